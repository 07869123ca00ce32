#include "nopt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "nopt/errors.hpp"

namespace nopt {
namespace {

template <class T>
void put_le(std::vector<char>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const char* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

std::string encode_metadata(const Checkpoint& c) {
    return "optimizer=" + c.optimizer + "\nstep=" + std::to_string(c.step) + "\n";
}

void decode_metadata(const std::string& blob, Checkpoint& c) {
    std::istringstream in(blob);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "optimizer") {
            c.optimizer = value;
        } else if (key == "step") {
            try {
                c.step = std::stoull(value);
            } catch (const std::exception&) {
                throw FormatError("bad step in checkpoint metadata: '" + value + "'");
            }
        }
    }
}

} // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::vector<char> buf;
    const std::string meta = encode_metadata(ckpt);
    buf.reserve(24 + 8 * ckpt.values.size() + 4 + meta.size());
    buf.insert(buf.end(), std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
    put_le<std::uint32_t>(buf, kCheckpointVersion);
    put_le<std::uint64_t>(buf, ckpt.values.size());
    for (double v : ckpt.values) put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(v));
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(meta.size()));
    buf.insert(buf.end(), meta.begin(), meta.end());

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof kCheckpointMagic || std::memcmp(buf.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
        throw FormatError("not a checkpoint file");
    }
    if (buf.size() < 20) throw FormatError("truncated header");
    Checkpoint c;
    c.version = get_le<std::uint32_t>(buf.data() + 8);
    if (c.version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(c.version));
    const auto count = get_le<std::uint64_t>(buf.data() + 12);
    const std::size_t payload_end = 20 + 8 * count;
    if (count > (buf.size() - 20) / 8 || buf.size() < payload_end) throw FormatError("truncated payload");

    c.values = Vector(count);
    for (std::size_t i = 0; i < count; ++i) {
        c.values[i] = std::bit_cast<double>(get_le<std::uint64_t>(buf.data() + 20 + 8 * i));
    }
    if (buf.size() < payload_end + 4) throw FormatError("truncated metadata");
    const auto meta_len = get_le<std::uint32_t>(buf.data() + payload_end);
    if (buf.size() < payload_end + 4 + meta_len) throw FormatError("truncated metadata");
    decode_metadata(std::string(buf.data() + payload_end + 4, meta_len), c);
    return c;
}

} // namespace nopt
