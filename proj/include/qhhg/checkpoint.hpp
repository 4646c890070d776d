#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qhhg/common.hpp"
#include "qhhg/propagation.hpp"

namespace qhhg {

// Versioned binary checkpoint: little-endian scalars, raw complex amplitudes
// as float64 pairs, and an FNV-1a checksum over the payload. Written to a
// temporary file and renamed so readers never see a torn write.

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

struct Checkpoint {
    ModelParams params;
    Grid3 grid;
    RunSpec spec;
    long step_index = 0;
    DipoleRecord record;
    std::vector<cdouble> amplitudes;
};

namespace ckpt_detail {

constexpr char kMagic[8] = {'Q', 'H', 'H', 'G', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

class Hasher {
  public:
    void feed(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 1099511628211ull;
        }
    }
    std::uint64_t value() const { return h_; }

  private:
    std::uint64_t h_ = 1469598103934665603ull;
};

class Writer {
  public:
    explicit Writer(std::ofstream& out) : out_(out) {}
    template <typename T>
    void put(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
        hash_.feed(&v, sizeof v);
    }
    void put_bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        hash_.feed(data, n);
    }
    std::uint64_t checksum() const { return hash_.value(); }

  private:
    std::ofstream& out_;
    Hasher hash_;
};

class Reader {
  public:
    explicit Reader(std::ifstream& in) : in_(in) {}
    template <typename T>
    T get() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in_) throw io_error("truncated checkpoint");
        hash_.feed(&v, sizeof v);
        return v;
    }
    void get_bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (!in_) throw io_error("truncated checkpoint");
        hash_.feed(data, n);
    }
    std::uint64_t checksum() const { return hash_.value(); }

  private:
    std::ifstream& in_;
    Hasher hash_;
};

template <typename IO>
void params_fields(IO& io, ModelParams& p) {
    io.real(p.omega_L);
    io.integer(p.harmonic_p);
    io.integer(p.harmonic_q);
    io.real(p.lambda);
    io.enum8(p.potential.kind);
    io.real(p.potential.soft_b);
    io.real(p.potential.gauss_depth);
    io.real(p.potential.gauss_alpha);
    io.real(p.e0);
    io.real(p.env.t_r);
    io.real(p.env.t_d);
    io.real(p.env.t_s);
    io.flag(p.quiver_absorber);
    io.real(p.quiver_ramp);
    io.flag(p.self_dipole_enveloped);
}

template <typename IO>
void spec_fields(IO& io, RunSpec& s) {
    io.real(s.dt);
    io.integer(s.sample_stride);
    io.flag(s.cap_enabled);
    io.real(s.cap.width);
    io.real(s.cap.strength);
    io.flag(s.cap_photon_axes);
    io.real(s.tail_cycles);
    io.real(s.t_final);
    io.integer(s.checkpoint_every);
}

struct WriteIO {
    Writer& w;
    void real(double v) { w.put(v); }
    void integer(int v) { w.put(static_cast<std::int32_t>(v)); }
    void flag(bool v) { w.put(static_cast<std::uint8_t>(v ? 1 : 0)); }
    template <typename E>
    void enum8(E v) {
        w.put(static_cast<std::uint8_t>(v));
    }
};

struct ReadIO {
    Reader& r;
    void real(double& v) { v = r.get<double>(); }
    void integer(int& v) { v = r.get<std::int32_t>(); }
    void flag(bool& v) { v = r.get<std::uint8_t>() != 0; }
    template <typename E>
    void enum8(E& v) {
        v = static_cast<E>(r.get<std::uint8_t>());
    }
};

}  // namespace ckpt_detail

inline void write_checkpoint(const std::string& path, const Checkpoint& c) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write checkpoint '" + tmp + "'");
        out.write(ckpt_detail::kMagic, sizeof ckpt_detail::kMagic);
        ckpt_detail::Writer w(out);
        w.put(ckpt_detail::kVersion);
        ckpt_detail::WriteIO wio{w};
        ModelParams params = c.params;
        ckpt_detail::params_fields(wio, params);
        for (const Axis& a : c.grid.axes) {
            w.put(static_cast<std::int32_t>(a.n_points));
            w.put(a.spacing);
            w.put(a.origin);
        }
        RunSpec spec = c.spec;
        ckpt_detail::spec_fields(wio, spec);
        w.put(static_cast<std::int64_t>(c.step_index));
        w.put(static_cast<std::uint64_t>(c.record.times.size()));
        w.put_bytes(c.record.times.data(), c.record.times.size() * sizeof(double));
        w.put_bytes(c.record.dipole.data(), c.record.dipole.size() * sizeof(double));
        w.put_bytes(c.record.norm.data(), c.record.norm.size() * sizeof(double));
        w.put(static_cast<std::uint64_t>(c.amplitudes.size()));
        w.put_bytes(c.amplitudes.data(), c.amplitudes.size() * sizeof(cdouble));
        const std::uint64_t sum = w.checksum();
        out.write(reinterpret_cast<const char*>(&sum), sizeof sum);
        if (!out) throw io_error("short write on checkpoint '" + tmp + "'");
    }
    fs::rename(tmp, path);
}

inline Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, ckpt_detail::kMagic, sizeof magic) != 0)
        throw io_error("'" + path + "' is not a checkpoint file");
    ckpt_detail::Reader r(in);
    const auto version = r.get<std::uint32_t>();
    if (version != ckpt_detail::kVersion)
        throw io_error("unsupported checkpoint version " + std::to_string(version));
    Checkpoint c;
    ckpt_detail::ReadIO rio{r};
    ckpt_detail::params_fields(rio, c.params);
    for (Axis& a : c.grid.axes) {
        a.n_points = r.get<std::int32_t>();
        a.spacing = r.get<double>();
        a.origin = r.get<double>();
    }
    ckpt_detail::spec_fields(rio, c.spec);
    c.step_index = static_cast<long>(r.get<std::int64_t>());
    const auto n_samples = r.get<std::uint64_t>();
    c.record.times.resize(n_samples);
    c.record.dipole.resize(n_samples);
    c.record.norm.resize(n_samples);
    r.get_bytes(c.record.times.data(), n_samples * sizeof(double));
    r.get_bytes(c.record.dipole.data(), n_samples * sizeof(double));
    r.get_bytes(c.record.norm.data(), n_samples * sizeof(double));
    const auto n_amp = r.get<std::uint64_t>();
    c.amplitudes.resize(n_amp);
    r.get_bytes(c.amplitudes.data(), n_amp * sizeof(cdouble));
    const std::uint64_t expected = r.checksum();
    std::uint64_t stored = 0;
    in.read(reinterpret_cast<char*>(&stored), sizeof stored);
    if (!in || stored != expected) throw io_error("checkpoint '" + path + "' failed its checksum");
    c.params.validate();
    if (c.amplitudes.size() != c.grid.size())
        throw io_error("checkpoint amplitude count does not match its grid");
    return c;
}

/// Snapshot of a live propagation.
inline Checkpoint make_checkpoint(const Propagator& prop, const Grid3& grid) {
    Checkpoint c;
    c.params = prop.params();
    c.grid = grid;
    c.spec = prop.spec();
    c.step_index = prop.step_index();
    c.record = prop.record();
    c.amplitudes = prop.state().amp;
    return c;
}

/// Rebuild a propagator mid-run from a checkpoint.
inline Propagator resume_propagator(const Checkpoint& c) {
    Propagator prop(c.params, c.grid, c.spec);
    prop.set_state(Wavefunction3(c.grid, c.amplitudes));
    prop.set_progress(c.step_index, c.record);
    return prop;
}

}  // namespace qhhg
