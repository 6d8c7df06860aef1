#include "gflow/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "gflow/errors.hpp"

namespace gflow {

namespace {

constexpr char kMagic[8] = {'G', 'F', 'L', 'O', 'W', 'C', 'K', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8))
        throw ParseError(path, 0, "truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_doubles(std::ofstream& out, const double* x, std::size_t len) {
    // Little-endian on every platform this project targets; serialize the
    // raw bit pattern per element.
    for (std::size_t i = 0; i < len; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &x[i], 8);
        unsigned char buf[8];
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
        out.write(reinterpret_cast<const char*>(buf), 8);
    }
}

void read_doubles(std::ifstream& in, double* x, std::size_t len, const std::string& path) {
    for (std::size_t i = 0; i < len; ++i) {
        unsigned char buf[8];
        if (!in.read(reinterpret_cast<char*>(buf), 8))
            throw ParseError(path, 0, "truncated tensor data");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        std::memcpy(&x[i], &bits, 8);
    }
}

const char* act_name(Activation a) { return a == Activation::Relu ? "relu" : "identity"; }

Activation act_from_name(const std::string& s, const std::string& path) {
    if (s == "relu") return Activation::Relu;
    if (s == "identity") return Activation::Identity;
    throw ParseError(path, 0, "unknown activation in manifest: " + s);
}

} // namespace

void save_checkpoint(const std::string& path, const DenseParams& params,
                     const nlohmann::json& metadata) {
    nlohmann::json manifest;
    manifest["format"] = 1;
    manifest["meta"] = metadata;
    auto& layers = manifest["layers"] = nlohmann::json::array();
    for (const auto& l : params.layers) {
        layers.push_back({{"in", l.w.rows()}, {"out", l.w.cols()}, {"act", act_name(l.act)}});
    }
    const std::string mstr = manifest.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint: " + path);
    out.write(kMagic, 8);
    write_u64(out, mstr.size());
    out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
    for (const auto& l : params.layers) {
        write_u64(out, l.w.rows());
        write_u64(out, l.w.cols());
        write_doubles(out, l.w.data(), l.w.size());
        write_u64(out, 1);
        write_u64(out, l.b.size());
        write_doubles(out, l.b.data(), l.b.size());
    }
    if (!out) throw ConfigError("write failed for checkpoint: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw ParseError(path, 0, "not a gflow checkpoint (bad magic)");
    const std::uint64_t mlen = read_u64(in, path);
    std::string mstr(mlen, '\0');
    if (!in.read(mstr.data(), static_cast<std::streamsize>(mlen)))
        throw ParseError(path, 0, "truncated manifest");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(mstr);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, std::string("manifest is not valid JSON: ") + e.what());
    }

    LoadedCheckpoint ck;
    ck.metadata = manifest.value("meta", nlohmann::json::object());
    for (const auto& lj : manifest.at("layers")) {
        Layer l;
        const std::uint64_t wr = read_u64(in, path);
        const std::uint64_t wc = read_u64(in, path);
        if (wr != lj.at("in").get<std::uint64_t>() || wc != lj.at("out").get<std::uint64_t>())
            throw ParseError(path, 0, "tensor shape disagrees with manifest");
        l.w = Matrix(wr, wc);
        read_doubles(in, l.w.data(), l.w.size(), path);
        const std::uint64_t br = read_u64(in, path);
        const std::uint64_t bc = read_u64(in, path);
        if (br != 1 || bc != wc) throw ParseError(path, 0, "bias shape disagrees with manifest");
        l.b.resize(bc);
        read_doubles(in, l.b.data(), l.b.size(), path);
        l.act = act_from_name(lj.at("act").get<std::string>(), path);
        ck.params.layers.push_back(std::move(l));
    }
    ck.params.check_chain();
    return ck;
}

} // namespace gflow
