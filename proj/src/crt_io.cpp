#include "crt/crt_io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "crt/errors.hpp"

namespace crt {

namespace {

constexpr char kMagic[4] = {'C', 'R', 'T', '1'};
constexpr std::uint16_t kVersion = 1;

struct Writer {
    std::ofstream out;

    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw CrtError("IoError", "cannot open '" + path + "' for writing");
    }
    template <class T>
    void put(T v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_bytes(const void* p, std::size_t n) {
        out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
};

struct Reader {
    std::ifstream in;
    std::string path;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw CrtError("IoError", "cannot open '" + p + "' for reading");
    }
    template <class T>
    T get() {
        T v{};
        in.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in) throw CrcMismatch("'" + path + "': truncated file");
        return v;
    }
    void get_bytes(void* p, std::size_t n) {
        in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in) throw CrcMismatch("'" + path + "': truncated file");
    }
};

void write_header(Writer& w, CrtKind kind) {
    w.put_bytes(kMagic, 4);
    w.put<std::uint16_t>(kVersion);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(kind));
}

CrtKind read_header(Reader& r) {
    char magic[4];
    r.get_bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw BadMagic("'" + r.path + "' is not a CRT file");
    }
    const auto version = r.get<std::uint16_t>();
    if (version != kVersion) {
        throw SchemaMismatch("'" + r.path + "': unsupported CRT version " + std::to_string(version));
    }
    return static_cast<CrtKind>(r.get<std::uint16_t>());
}

void write_grid_payload(Writer& w, const ConeDataGrid& g, StageTag stage, int deriv_order) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(stage));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.k));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(deriv_order));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.grids.y.n_y));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.grids.phi.n_phi));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.grids.s.n_s));
    w.put<double>(g.grids.s.s_min);
    w.put<double>(g.grids.s.s_max);
    w.put<std::uint64_t>(g.phantom_hash);
    w.put<std::uint64_t>(g.config_hash);
    const std::size_t bytes = g.data.size() * sizeof(double);
    w.put_bytes(g.data.data(), bytes);
    w.put<std::uint32_t>(crc32(g.data.data(), bytes));
}

void read_grid_payload(Reader& r, ConeDataGrid& g, StageTag& stage, int& deriv_order) {
    stage = static_cast<StageTag>(r.get<std::uint32_t>());
    g.k = static_cast<int>(r.get<std::uint32_t>());
    deriv_order = static_cast<int>(r.get<std::uint32_t>());
    g.grids.y.n_y = static_cast<int>(r.get<std::uint32_t>());
    g.grids.phi.n_phi = static_cast<int>(r.get<std::uint32_t>());
    g.grids.s.n_s = static_cast<int>(r.get<std::uint32_t>());
    g.grids.s.s_min = r.get<double>();
    g.grids.s.s_max = r.get<double>();
    g.phantom_hash = r.get<std::uint64_t>();
    g.config_hash = r.get<std::uint64_t>();
    if (g.grids.y.n_y < 2 || g.grids.phi.n_phi < 2 || g.grids.s.n_s < 2 || g.k < 1) {
        throw SchemaMismatch("'" + r.path + "': implausible grid header");
    }
    g.data.resize(g.size());
    const std::size_t bytes = g.data.size() * sizeof(double);
    r.get_bytes(g.data.data(), bytes);
    const auto stored = r.get<std::uint32_t>();
    if (stored != crc32(g.data.data(), bytes)) {
        throw CrcMismatch("'" + r.path + "': payload CRC mismatch");
    }
}

} // namespace

std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t seed) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int b = 0; b < 8; ++b) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = ~seed;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
    return ~c;
}

void write_crt(const ConeDataGrid& g, const std::string& path) {
    Writer w(path);
    write_header(w, CrtKind::cone_grid);
    write_grid_payload(w, g, StageTag::raw, 0);
    if (!w.out) throw CrtError("IoError", "short write to '" + path + "'");
}

void write_crt(const ProcessedGrid& g, const std::string& path) {
    Writer w(path);
    write_header(w, CrtKind::processed_grid);
    write_grid_payload(w, g, g.deriv_order > 0 ? StageTag::processed_dy : StageTag::processed,
                       g.deriv_order);
    if (!w.out) throw CrtError("IoError", "short write to '" + path + "'");
}

void write_crt(const VolumeGrid& v, const std::string& path) {
    Writer w(path);
    write_header(w, CrtKind::volume);
    w.put<double>(v.spec.origin[0]);
    w.put<double>(v.spec.origin[1]);
    w.put<double>(v.spec.origin[2]);
    w.put<double>(v.spec.spacing);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(v.spec.dims[0]));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(v.spec.dims[1]));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(v.spec.dims[2]));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(v.invalid_margin));
    const std::size_t bytes = v.values.size() * sizeof(double);
    w.put_bytes(v.values.data(), bytes);
    w.put<std::uint32_t>(crc32(v.values.data(), bytes));
    if (!w.out) throw CrtError("IoError", "short write to '" + path + "'");
}

CrtKind peek_crt_kind(const std::string& path) {
    Reader r(path);
    return read_header(r);
}

ConeDataGrid read_cone_grid(const std::string& path) {
    Reader r(path);
    if (read_header(r) != CrtKind::cone_grid) {
        throw SchemaMismatch("'" + path + "' does not hold raw cone data");
    }
    ConeDataGrid g;
    StageTag stage;
    int deriv_order;
    read_grid_payload(r, g, stage, deriv_order);
    if (stage != StageTag::raw) throw SchemaMismatch("'" + path + "': unexpected stage tag");
    return g;
}

ProcessedGrid read_processed_grid(const std::string& path) {
    Reader r(path);
    if (read_header(r) != CrtKind::processed_grid) {
        throw SchemaMismatch("'" + path + "' does not hold processed data");
    }
    ProcessedGrid g;
    StageTag stage;
    read_grid_payload(r, g, stage, g.deriv_order);
    if (stage != StageTag::processed && stage != StageTag::processed_dy) {
        throw SchemaMismatch("'" + path + "': unexpected stage tag");
    }
    return g;
}

VolumeGrid read_volume(const std::string& path) {
    Reader r(path);
    if (read_header(r) != CrtKind::volume) {
        throw SchemaMismatch("'" + path + "' does not hold a volume");
    }
    VolumeGrid v;
    v.spec.origin[0] = r.get<double>();
    v.spec.origin[1] = r.get<double>();
    v.spec.origin[2] = r.get<double>();
    v.spec.spacing = r.get<double>();
    v.spec.dims[0] = static_cast<int>(r.get<std::uint32_t>());
    v.spec.dims[1] = static_cast<int>(r.get<std::uint32_t>());
    v.spec.dims[2] = static_cast<int>(r.get<std::uint32_t>());
    v.invalid_margin = static_cast<int>(r.get<std::uint32_t>());
    for (int d : v.spec.dims) {
        if (d < 1 || d > (1 << 20)) throw SchemaMismatch("'" + path + "': implausible dims");
    }
    v.values.resize(v.spec.size());
    const std::size_t bytes = v.values.size() * sizeof(double);
    r.get_bytes(v.values.data(), bytes);
    const auto stored = r.get<std::uint32_t>();
    if (stored != crc32(v.values.data(), bytes)) {
        throw CrcMismatch("'" + path + "': payload CRC mismatch");
    }
    return v;
}

Metrics metrics(const VolumeGrid& recon, const VolumeGrid& truth) {
    if (!(recon.spec == truth.spec)) {
        throw SpecMismatch("metrics: volume specs differ");
    }
    const int margin = std::max(recon.invalid_margin, truth.invalid_margin);
    const auto& d = recon.spec.dims;
    if (2 * margin >= d[0] || 2 * margin >= d[1] || 2 * margin >= d[2]) {
        throw SpecMismatch("metrics: invalid margin leaves no voxels");
    }
    double num = 0.0, den = 0.0, max_abs = 0.0, max_truth = 0.0;
    for (int i = margin; i < d[0] - margin; ++i) {
        for (int j = margin; j < d[1] - margin; ++j) {
            for (int l = margin; l < d[2] - margin; ++l) {
                const double r = recon.at(i, j, l);
                const double t = truth.at(i, j, l);
                num += (r - t) * (r - t);
                den += t * t;
                max_abs = std::max(max_abs, std::abs(r - t));
                max_truth = std::max(max_truth, std::abs(t));
            }
        }
    }
    Metrics m;
    m.max_abs = max_abs;
    m.rel_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    const double rmse_den = num;
    if (max_truth > 0.0 && rmse_den > 0.0) {
        std::size_t count = static_cast<std::size_t>(d[0] - 2 * margin) * (d[1] - 2 * margin) *
                            (d[2] - 2 * margin);
        const double rmse = std::sqrt(num / static_cast<double>(count));
        m.psnr = 20.0 * std::log10(max_truth / rmse);
    } else {
        m.psnr = std::numeric_limits<double>::infinity();
    }
    return m;
}

} // namespace crt
