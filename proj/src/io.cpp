#include "tflow/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tflow/elliptic.hpp"
#include "tflow/fd.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot layout assumes a little-endian host");

namespace tflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line << ": " << msg;
    throw ConfigError(os.str());
}

double to_double(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(d))
        fail_line(line, "expected a number for '" + key + "', got '" + v + "'");
    return d;
}

long long to_int(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const long long n = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        fail_line(line, "expected an integer for '" + key + "', got '" + v + "'");
    return n;
}

std::uint64_t to_u64(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        fail_line(line, "expected an unsigned integer for '" + key + "', got '" + v + "'");
    return n;
}

bool to_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail_line(line, "expected true/false for '" + key + "', got '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
    try {
        make_grid();
        params.validate();
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(t_end > 0.0)) throw ConfigError("run: t_end must be > 0");
    if (cadence < 1) throw ConfigError("run: output_cadence must be >= 1");

    const InitialSpec& in = initial;
    const double limit = 1.0 - params.pot.xi;
    auto check_amp = [&](double a, const char* what) {
        if (std::abs(a) > limit) {
            std::ostringstream os;
            os << "initial: " << what << " " << a << " violates max|phi0| <= 1 - xi = "
               << limit;
            throw ConfigError(os.str());
        }
    };
    if (in.phi_preset == "constant") {
        check_amp(in.value, "value");
    } else if (in.phi_preset == "cosine_mode") {
        if (in.mode_k < 1) throw ConfigError("initial: mode_k must be >= 1");
        check_amp(in.amplitude, "amplitude");
    } else if (in.phi_preset == "tanh_interface") {
        if (!(in.width > 0.0)) throw ConfigError("initial: width must be > 0");
        if (in.orientation != "x" && in.orientation != "y")
            throw ConfigError("initial: orientation must be x or y");
        check_amp(in.amplitude, "amplitude");
    } else if (in.phi_preset == "random_spinodal") {
        check_amp(in.amplitude, "amplitude");
    } else if (in.phi_preset == "thrombus_blob") {
        if (!(in.width > 0.0)) throw ConfigError("initial: width must be > 0");
        if (!(in.radius > 0.0)) throw ConfigError("initial: radius must be > 0");
        check_amp(in.amplitude, "amplitude");
    } else {
        throw ConfigError("initial: unknown phi preset '" + in.phi_preset + "'");
    }
    if (in.u_preset != "zero" && in.u_preset != "shear")
        throw ConfigError("initial: unknown u preset '" + in.u_preset + "'");
    if (in.psi_preset != "constant" && in.psi_preset != "sine")
        throw ConfigError("initial: unknown psi preset '" + in.psi_preset + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail_line(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "grid" && section != "potential" && section != "coefficients" &&
                section != "solver" && section != "run" && section != "initial")
                fail_line(line, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail_line(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail_line(line, "empty key");
        if (val.empty()) fail_line(line, "empty value for '" + key + "'");
        if (section.empty()) fail_line(line, "key '" + key + "' outside any section");

        const std::string full = section + "." + key;
        if (full == "grid.nx") cfg.nx = static_cast<int>(to_int(val, line, full));
        else if (full == "grid.ny") cfg.ny = static_cast<int>(to_int(val, line, full));
        else if (full == "grid.lx") cfg.lx = to_double(val, line, full);
        else if (full == "grid.ly") cfg.ly = to_double(val, line, full);
        else if (full == "potential.theta") cfg.params.pot.theta = to_double(val, line, full);
        else if (full == "potential.theta0") cfg.params.pot.theta0 = to_double(val, line, full);
        else if (full == "potential.xi") cfg.params.pot.xi = to_double(val, line, full);
        else if (full == "coefficients.nu1") cfg.params.coef.nu1 = to_double(val, line, full);
        else if (full == "coefficients.nu2") cfg.params.coef.nu2 = to_double(val, line, full);
        else if (full == "coefficients.lambda_star")
            cfg.params.coef.lambda_star = to_double(val, line, full);
        else if (full == "coefficients.lambda_slope")
            cfg.params.coef.lambda_slope = to_double(val, line, full);
        else if (full == "coefficients.k_star") cfg.params.coef.k_star = to_double(val, line, full);
        else if (full == "coefficients.k_slope") cfg.params.coef.k_slope = to_double(val, line, full);
        else if (full == "coefficients.sigma") cfg.params.coef.sigma = to_double(val, line, full);
        else if (full == "solver.dt") cfg.solver.dt = to_double(val, line, full);
        else if (full == "solver.newton_tol") cfg.solver.newton_tol = to_double(val, line, full);
        else if (full == "solver.newton_max")
            cfg.solver.newton_max = static_cast<int>(to_int(val, line, full));
        else if (full == "solver.scheme") {
            if (val == "semi_implicit") cfg.solver.scheme = Scheme::semi_implicit;
            else if (val == "explicit_reference") cfg.solver.scheme = Scheme::explicit_reference;
            else fail_line(line, "unknown scheme '" + val + "'");
        } else if (full == "solver.use_potential_form_forcing")
            cfg.solver.use_potential_form_forcing = to_bool(val, line, full);
        else if (full == "solver.alpha_filter") {
            cfg.solver.alpha_filter = to_double(val, line, full);
            cfg.params.coef.alpha_filter = cfg.solver.alpha_filter;
        } else if (full == "run.t_end") cfg.t_end = to_double(val, line, full);
        else if (full == "run.output_cadence")
            cfg.cadence = static_cast<int>(to_int(val, line, full));
        else if (full == "run.output_dir") cfg.output_dir = val;
        else if (full == "initial.preset") cfg.initial.phi_preset = val;
        else if (full == "initial.value") cfg.initial.value = to_double(val, line, full);
        else if (full == "initial.mode_k")
            cfg.initial.mode_k = static_cast<int>(to_int(val, line, full));
        else if (full == "initial.amplitude") cfg.initial.amplitude = to_double(val, line, full);
        else if (full == "initial.width") cfg.initial.width = to_double(val, line, full);
        else if (full == "initial.orientation") cfg.initial.orientation = val;
        else if (full == "initial.radius") cfg.initial.radius = to_double(val, line, full);
        else if (full == "initial.center_x") cfg.initial.center_x = to_double(val, line, full);
        else if (full == "initial.center_y") cfg.initial.center_y = to_double(val, line, full);
        else if (full == "initial.seed") cfg.initial.seed = to_u64(val, line, full);
        else if (full == "initial.u_preset") cfg.initial.u_preset = val;
        else if (full == "initial.u_amplitude")
            cfg.initial.u_amplitude = to_double(val, line, full);
        else if (full == "initial.psi_preset") cfg.initial.psi_preset = val;
        else if (full == "initial.psi_x") cfg.initial.psi_x = to_double(val, line, full);
        else if (full == "initial.psi_y") cfg.initial.psi_y = to_double(val, line, full);
        else if (full == "initial.psi_amplitude")
            cfg.initial.psi_amplitude = to_double(val, line, full);
        else fail_line(line, "unknown key '" + full + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

double unit_uniform(std::mt19937_64& eng) {
    // fixed 53-bit mapping so the stream does not depend on the library
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

State build_initial_state(const RunConfig& cfg) {
    cfg.validate();
    const Grid2D g = cfg.make_grid();
    const InitialSpec& in = cfg.initial;
    const double pi = std::acos(-1.0);
    State s(g);

    if (in.phi_preset == "constant") {
        for (double& v : s.phi.a) v = in.value;
    } else if (in.phi_preset == "cosine_mode") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                s.phi(i, j) = in.amplitude * std::cos(in.mode_k * pi * g.x(i) / g.lx);
    } else if (in.phi_preset == "tanh_interface") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double c = in.orientation == "x" ? g.x(i) - 0.5 * g.lx
                                                       : g.y(j) - 0.5 * g.ly;
                s.phi(i, j) = in.amplitude * std::tanh(c / in.width);
            }
    } else if (in.phi_preset == "random_spinodal") {
        std::mt19937_64 eng(in.seed);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                s.phi(i, j) = in.amplitude * (2.0 * unit_uniform(eng) - 1.0);
    } else if (in.phi_preset == "thrombus_blob") {
        const double cx = in.center_x * g.lx, cy = in.center_y * g.ly;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double r = std::hypot(g.x(i) - cx, g.y(j) - cy);
                s.phi(i, j) = in.amplitude * std::tanh((r - in.radius) / in.width);
            }
    }
    if (std::abs(mean(s.phi)) >= 1.0)
        throw ConfigError("initial: |mean(phi0)| must be < 1");

    if (in.psi_preset == "constant") {
        for (double& v : s.psi.x.a) v = in.psi_x;
        for (double& v : s.psi.y.a) v = in.psi_y;
    } else {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double sx = std::sin(pi * g.x(i) / g.lx);
                const double sy = std::sin(pi * g.y(j) / g.ly);
                const double cx = std::cos(pi * g.x(i) / g.lx);
                const double cyv = std::cos(pi * g.y(j) / g.ly);
                s.psi.x(i, j) = in.psi_amplitude * sx * sy;
                s.psi.y(i, j) = in.psi_amplitude * cx * cyv;
            }
    }

    if (in.u_preset == "shear" && in.u_amplitude != 0.0) {
        // velocity from the stream function A sin^2(pi x/lx) sin^2(pi y/ly),
        // zero on every wall
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double sx = std::sin(pi * g.x(i) / g.lx);
                const double sy = std::sin(pi * g.y(j) / g.ly);
                const double s2x = std::sin(2.0 * pi * g.x(i) / g.lx);
                const double s2y = std::sin(2.0 * pi * g.y(j) / g.ly);
                s.u.x(i, j) = in.u_amplitude * sx * sx * s2y * pi / g.ly;
                s.u.y(i, j) = -in.u_amplitude * s2x * pi / g.lx * sy * sy;
            }
        s.u = project(s.u, 1.0, 1e-12).u;
    }

    s.mu = chemical_potential(s.phi, s.psi, cfg.params);
    s.t = 0.0;
    return s;
}

namespace {

constexpr char kMagic[5] = {'T', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

}  // namespace

void write_snapshot(const State& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const Grid2D& g = s.grid();
    const std::uint32_t nx = static_cast<std::uint32_t>(g.nx);
    const std::uint32_t ny = static_cast<std::uint32_t>(g.ny);
    put_bytes(out, kMagic, sizeof kMagic);
    put_bytes(out, &kVersion, 4);
    put_bytes(out, &nx, 4);
    put_bytes(out, &ny, 4);
    put_bytes(out, &g.lx, 8);
    put_bytes(out, &g.ly, 8);
    put_bytes(out, &s.t, 8);
    const ScalarField* fields[7] = {&s.u.x, &s.u.y, &s.phi, &s.psi.x, &s.psi.y,
                                    &s.mu, &s.pi};
    for (const ScalarField* f : fields)
        put_bytes(out, f->a.data(), f->a.size() * 8);
    if (!out) throw IoError("write failed for '" + path + "'");
}

State read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open snapshot '" + path + "'");
    const std::uint64_t actual = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    char magic[5];
    std::uint32_t version = 0, nx = 0, ny = 0;
    double lx = 0, ly = 0, t = 0;
    const std::uint64_t header = 5 + 4 + 4 + 4 + 8 + 8 + 8;
    if (actual < header) {
        std::ostringstream os;
        os << "snapshot '" << path << "' truncated: expected at least " << header
           << " bytes, got " << actual;
        throw IoError(os.str());
    }
    in.read(magic, 5);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    in.read(reinterpret_cast<char*>(&lx), 8);
    in.read(reinterpret_cast<char*>(&ly), 8);
    in.read(reinterpret_cast<char*>(&t), 8);
    if (std::memcmp(magic, kMagic, 5) != 0)
        throw IoError("snapshot '" + path + "': bad magic");
    if (version != kVersion) {
        std::ostringstream os;
        os << "snapshot '" << path << "': unsupported version " << version;
        throw IoError(os.str());
    }
    const std::uint64_t ncell = static_cast<std::uint64_t>(nx) * ny;
    const std::uint64_t expected = header + 7 * 8 * ncell;
    if (actual != expected) {
        std::ostringstream os;
        os << "snapshot '" << path << "' truncated: expected " << expected
           << " bytes, got " << actual;
        throw IoError(os.str());
    }
    Grid2D g;
    try {
        g = Grid2D(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("snapshot '") + path + "': " + e.what());
    }
    State s(g);
    s.t = t;
    ScalarField* fields[7] = {&s.u.x, &s.u.y, &s.phi, &s.psi.x, &s.psi.y, &s.mu,
                              &s.pi};
    for (ScalarField* f : fields)
        in.read(reinterpret_cast<char*>(f->a.data()),
                static_cast<std::streamsize>(f->a.size() * 8));
    if (!in) throw IoError("read failed for '" + path + "'");
    return s;
}

std::string csv_header() {
    return "t,e_kin,e_coh,e_ela,e_total,dissipation,mass,max_abs_phi,"
           "separation_margin,div_residual,energy_residual";
}

std::string csv_row(const EnergyReport& r) {
    const double v[11] = {r.t, r.e_kin, r.e_coh, r.e_ela, r.e_total, r.dissipation,
                          r.mass, r.max_abs_phi, r.separation_margin,
                          r.div_residual, r.energy_residual};
    std::string out;
    char buf[32];
    for (int i = 0; i < 11; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        if (i) out += ',';
        out += buf;
    }
    return out;
}

}  // namespace tflow
