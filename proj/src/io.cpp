#include "prandtl3d/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "prandtl3d/barrier.hpp"
#include "prandtl3d/vector_calculus.hpp"

namespace prandtl3d {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

Grid3 RunConfig::grid() const { return Grid3::make(nx, ny, nz, X, Y, Zmax, stretch); }

SolverConfig RunConfig::solver() const {
  SolverConfig c;
  c.eps0_schedule = eps0_schedule;
  c.picard_tol = picard_tol;
  c.picard_max = picard_max;
  c.inner_tol = inner_tol;
  c.inner_max = inner_max;
  c.upwind_order = upwind_order;
  c.u_floor_factor = u_floor_factor;
  c.wall_flux = wall_flux;
  return c;
}

PerturbationSpec RunConfig::perturbation() const {
  PerturbationSpec p;
  p.eps = eps;
  p.A = A;
  p.delta = delta;
  p.N = N;
  p.mu = mu;
  p.amp_u = amp_u;
  p.amp_v = amp_v;
  p.kappa_u = kappa_u;
  p.kappa_v = kappa_v;
  p.wavenumber_u = wavenumber_u;
  p.wavenumber_v = wavenumber_v;
  p.i_max = i_max;
  return p;
}

BarrierParams RunConfig::barrier(double eps0) const {
  BarrierParams b;
  b.A = A;
  b.delta = delta;
  b.N = N;
  b.mu = mu;
  b.alpha = alpha;
  b.eps0 = eps0;
  return b;
}

LedgerParams RunConfig::ledger(double eps0) const {
  LedgerParams l;
  l.eps = eps;
  l.w = barrier(eps0);
  l.d0 = d0;
  l.c0 = c0;
  l.C2 = C2 > 0 ? C2 : 1.0;
  l.C_dzK = C_dzK > 0 ? C_dzK : 1.0;
  l.u_floor = u_floor_factor * eps0;
  return l;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError("bad number for " + key + ": '" + v + "'", line);
  }
}

long to_long(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError("bad integer for " + key + ": '" + v + "'", line);
  }
}

bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("bad boolean for " + key + ": '" + v + "'", line);
}

std::string fmt(double v) { return format_double(v); }

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t n = 0; n < v.size(); ++n) s += (n ? "," : "") + fmt(v[n]);
  return s;
}

struct Key {
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key real(T RunConfig::*m, const std::string& key) {
  return {[m, key](RunConfig& c, const std::string& v, int line) { c.*m = to_double(v, key, line); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

template <typename T>
Key integer(T RunConfig::*m, const std::string& key) {
  return {[m, key](RunConfig& c, const std::string& v, int line) { c.*m = static_cast<T>(to_long(v, key, line)); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> k = [] {
    std::map<std::string, Key> m;
    m["grid.nx"] = integer(&RunConfig::nx, "grid.nx");
    m["grid.ny"] = integer(&RunConfig::ny, "grid.ny");
    m["grid.nz"] = integer(&RunConfig::nz, "grid.nz");
    m["grid.X"] = real(&RunConfig::X, "grid.X");
    m["grid.Y"] = real(&RunConfig::Y, "grid.Y");
    m["grid.Zmax"] = real(&RunConfig::Zmax, "grid.Zmax");
    m["grid.stretch"] = real(&RunConfig::stretch, "grid.stretch");
    m["physics.mu"] = real(&RunConfig::mu, "physics.mu");
    m["physics.x0"] = real(&RunConfig::x0, "physics.x0");
    m["physics.eps"] = real(&RunConfig::eps, "physics.eps");
    m["physics.eps0_schedule"] = {
        [](RunConfig& c, const std::string& v, int line) {
          c.eps0_schedule.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) c.eps0_schedule.push_back(to_double(trim(item), "physics.eps0_schedule", line));
          if (c.eps0_schedule.empty()) throw ParseError("empty physics.eps0_schedule", line);
        },
        [](const RunConfig& c) { return fmt_list(c.eps0_schedule); }};
    m["barrier.A"] = real(&RunConfig::A, "barrier.A");
    m["barrier.delta"] = real(&RunConfig::delta, "barrier.delta");
    m["barrier.N"] = real(&RunConfig::N, "barrier.N");
    m["barrier.alpha"] = real(&RunConfig::alpha, "barrier.alpha");
    m["perturbation.amp_u"] = real(&RunConfig::amp_u, "perturbation.amp_u");
    m["perturbation.amp_v"] = real(&RunConfig::amp_v, "perturbation.amp_v");
    m["perturbation.kappa_u"] = real(&RunConfig::kappa_u, "perturbation.kappa_u");
    m["perturbation.kappa_v"] = real(&RunConfig::kappa_v, "perturbation.kappa_v");
    m["perturbation.wavenumber_u"] = real(&RunConfig::wavenumber_u, "perturbation.wavenumber_u");
    m["perturbation.wavenumber_v"] = real(&RunConfig::wavenumber_v, "perturbation.wavenumber_v");
    m["perturbation.i_max"] = integer(&RunConfig::i_max, "perturbation.i_max");
    m["solver.picard_tol"] = real(&RunConfig::picard_tol, "solver.picard_tol");
    m["solver.picard_max"] = integer(&RunConfig::picard_max, "solver.picard_max");
    m["solver.inner_tol"] = real(&RunConfig::inner_tol, "solver.inner_tol");
    m["solver.inner_max"] = integer(&RunConfig::inner_max, "solver.inner_max");
    m["solver.upwind_order"] = integer(&RunConfig::upwind_order, "solver.upwind_order");
    m["solver.u_floor"] = real(&RunConfig::u_floor_factor, "solver.u_floor");
    m["solver.threads"] = integer(&RunConfig::threads, "solver.threads");
    m["solver.wall_flux"] = {
        [](RunConfig& c, const std::string& v, int line) { c.wall_flux = to_bool(v, "solver.wall_flux", line); },
        [](const RunConfig& c) { return std::string(c.wall_flux ? "true" : "false"); }};
    m["ledger.d0"] = real(&RunConfig::d0, "ledger.d0");
    m["ledger.c0"] = real(&RunConfig::c0, "ledger.c0");
    m["ledger.C2"] = real(&RunConfig::C2, "ledger.C2");
    m["ledger.C_dzK"] = real(&RunConfig::C_dzK, "ledger.C_dzK");
    m["io.out_dir"] = {[](RunConfig& c, const std::string& v, int) { c.out_dir = v; },
                       [](const RunConfig& c) { return c.out_dir; }};
    m["io.snapshot_every"] = integer(&RunConfig::snapshot_every, "io.snapshot_every");
    return m;
  }();
  return k;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'section.key = value'", line);
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) throw ParseError("unknown key '" + key + "'", line);
    if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line);
    it->second.set(c, value, line);
    seen[key] = line;
  }
  for (const char* req : {"grid.nx", "grid.ny", "grid.nz"})
    if (!seen.count(req)) throw ParseError(std::string("missing required key ") + req, 0);
  if (!(c.X <= 0.2)) throw ParseError("grid.X must not exceed 1/5", seen.count("grid.X") ? seen["grid.X"] : 0);
  if (c.upwind_order != 1 && c.upwind_order != 2)
    throw ParseError("solver.upwind_order must be 1 or 2", seen["solver.upwind_order"]);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config '" + path + "'", 0);
  return parse_config(f);
}

std::string canonical_text(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : keys()) s += k + " = " + v.get(c) + "\n";
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& c) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical_text(c));
  return os.str();
}

void write_blasius_csv(std::ostream& os, const BlasiusProfile& b) {
  os << "zeta,f,fp,fpp\n";
  for (Index n = 0; n < b.zeta_grid.size(); ++n)
    os << format_double(b.zeta_grid[n]) << ',' << format_double(b.f[n]) << ',' << format_double(b.fp[n]) << ','
       << format_double(b.fpp[n]) << '\n';
  os << "# fpp0=" << format_double(b.fpp0) << '\n';
}

void Snapshot::add(const std::string& name, const Field& f) {
  blocks.push_back({name, std::vector<double>(f.array().data(), f.array().data() + f.size())});
}

void Snapshot::add(const std::string& name, const Plane& p) {
  blocks.push_back({name, std::vector<double>(p.data(), p.data() + p.size())});
}

const SnapshotBlock& Snapshot::block(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw UnknownQuantity("snapshot has no block '" + name + "'");
}

Field Snapshot::field(const std::string& name) const {
  const SnapshotBlock& b = block(name);
  if (static_cast<Index>(b.data.size()) != nx * ny * nz) throw GridMismatch("block '" + name + "' is not a 3D field");
  Field f(nx, ny, nz);
  std::memcpy(f.array().data(), b.data.data(), b.data.size() * sizeof(double));
  return f;
}

Plane Snapshot::plane(const std::string& name, Index rows, Index cols) const {
  const SnapshotBlock& b = block(name);
  if (static_cast<Index>(b.data.size()) != rows * cols) throw GridMismatch("block '" + name + "' has wrong size");
  Plane p(rows, cols);
  std::memcpy(p.data(), b.data.data(), b.data.size() * sizeof(double));
  return p;
}

Snapshot make_snapshot(const Grid3& g) {
  Snapshot s;
  s.nx = g.nx();
  s.ny = g.ny();
  s.nz = g.nz();
  s.x.assign(g.x.data(), g.x.data() + g.nx());
  s.y.assign(g.y.data(), g.y.data() + g.ny());
  s.z.assign(g.z.data(), g.z.data() + g.nz());
  s.blocks.push_back({"grid.params", {g.X, g.Y, g.Zmax, g.stretch}});
  return s;
}

Grid3 snapshot_grid(const Snapshot& s) {
  const SnapshotBlock& p = s.block("grid.params");
  if (p.data.size() != 4) throw VersionMismatch("grid.params block has wrong size");
  Grid3 g = Grid3::make(s.nx, s.ny, s.nz, p.data[0], p.data[1], p.data[2], p.data[3]);
  for (Index i = 0; i < s.nx; ++i)
    if (g.x[i] != s.x[i]) throw GridMismatch("snapshot x axis differs from its grid parameters");
  for (Index j = 0; j < s.ny; ++j)
    if (g.y[j] != s.y[j]) throw GridMismatch("snapshot y axis differs from its grid parameters");
  for (Index k = 0; k < s.nz; ++k)
    if (g.z[k] != s.z[k]) throw GridMismatch("snapshot z axis differs from its grid parameters");
  return g;
}

Snapshot snapshot_of(const Grid3& g, const FieldState& st) {
  Snapshot s = make_snapshot(g);
  s.add("u", st.u);
  s.add("v", st.v);
  s.blocks.push_back({"iterate", {static_cast<double>(st.iterate_index)}});
  return s;
}

Snapshot snapshot_of(const BackgroundProfile& p) {
  Snapshot s = make_snapshot(p.grid);
  s.add("ubar", p.ubar);
  s.add("d_z_ubar", p.d_z_ubar);
  s.add("d_x_ubar", p.d_x_ubar);
  s.add("d_zz_ubar", p.d_zz_ubar);
  s.add("wbar", p.wbar);
  s.blocks.push_back({"eps0", {p.eps0}});
  s.blocks.push_back({"mu", {p.mu}});
  return s;
}

Snapshot snapshot_of(const Grid3& g, const BoundaryData& b) {
  Snapshot s = make_snapshot(g);
  s.add("wall_u", b.wall_u);
  s.add("wall_v", b.wall_v);
  s.add("inflow_u", b.inflow_u);
  s.add("inflow_v", b.inflow_v);
  s.add("side_u", b.side_u);
  s.add("side_v", b.side_v);
  s.add("top_u", b.top_u);
  s.add("top_v", b.top_v);
  return s;
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <typename T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw VersionMismatch("truncated snapshot");
  return v;
}

std::vector<double> get_doubles(std::istream& is, std::uint64_t n) {
  std::vector<double> v(n);
  if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw VersionMismatch("truncated snapshot");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const Snapshot& s) {
  os.write("P3DS", 4);
  put<std::uint32_t>(os, Snapshot::kVersion);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.nx));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.ny));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.nz));
  put_doubles(os, s.x);
  put_doubles(os, s.y);
  put_doubles(os, s.z);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.blocks.size()));
  for (const auto& b : s.blocks) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(b.name.size()));
    os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    put<std::uint64_t>(os, b.data.size());
    put_doubles(os, b.data);
  }
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write snapshot '" + path + "'");
  write_snapshot(f, s);
}

Snapshot read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "P3DS", 4) != 0) throw VersionMismatch("bad snapshot magic");
  const auto version = get<std::uint32_t>(is);
  if (version != Snapshot::kVersion) throw VersionMismatch("snapshot version " + std::to_string(version));
  Snapshot s;
  s.nx = static_cast<Index>(get<std::uint64_t>(is));
  s.ny = static_cast<Index>(get<std::uint64_t>(is));
  s.nz = static_cast<Index>(get<std::uint64_t>(is));
  s.x = get_doubles(is, s.nx);
  s.y = get_doubles(is, s.ny);
  s.z = get_doubles(is, s.nz);
  const auto nblocks = get<std::uint32_t>(is);
  for (std::uint32_t n = 0; n < nblocks; ++n) {
    SnapshotBlock b;
    const auto len = get<std::uint32_t>(is);
    b.name.resize(len);
    if (!is.read(b.name.data(), len)) throw VersionMismatch("truncated snapshot");
    b.data = get_doubles(is, get<std::uint64_t>(is));
    s.blocks.push_back(std::move(b));
  }
  return s;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read snapshot '" + path + "'");
  return read_snapshot(f);
}

std::vector<std::string> plot_quantities() { return {"u", "v", "q", "K", "dzu", "psi", "residual", "barrier"}; }

Field plot_quantity(const std::string& id, const FieldState& s, const BackgroundProfile& bg, const BarrierParams& w,
                    double u_floor) {
  const Grid3& g = bg.grid;
  if (id == "u") return s.u;
  if (id == "v") return s.v;
  if (id == "q") return s.q;
  if (id == "psi") return s.psi;
  if (id == "dzu") return d_dz(s.u, g);
  if (id == "K") return commutator_K_direct(make_context(g, s, u_floor, &bg, false));
  if (id == "residual") {
    const VFContext c = make_context(g, s, u_floor, &bg, true);
    return apply_P1(c, s.u, s.u);
  }
  if (id == "barrier") {
    const VFContext c = make_context(g, s, u_floor, &bg, true);
    const BarrierEval b = eval_phi1(g, w, w.alpha);
    const Field p = apply_P1_barrier(c, s.u, b);
    return like(p, p.array() / b.shape.array());
  }
  throw UnknownQuantity("'" + id + "'");
}

void emit_plot_data(std::ostream& os, const Grid3& g, const Field& f, const SliceSpec& sl) {
  const Index n = g.axis(sl.axis).size();
  if (sl.index < 0 || sl.index >= n) throw DomainError("slice index out of range");
  os << "coord1,coord2,value\n";
  auto row = [&](double a, double b, double v) { os << format_double(a) << ',' << format_double(b) << ',' << format_double(v) << '\n'; };
  const Index s = sl.index;
  switch (sl.axis) {
    case Axis::X:
      for (Index j = 0; j < g.ny(); ++j)
        for (Index k = 0; k < g.nz(); ++k) row(g.y[j], g.z[k], f(s, j, k));
      break;
    case Axis::Y:
      for (Index i = 0; i < g.nx(); ++i)
        for (Index k = 0; k < g.nz(); ++k) row(g.x[i], g.z[k], f(i, s, k));
      break;
    case Axis::Z:
      for (Index i = 0; i < g.nx(); ++i)
        for (Index j = 0; j < g.ny(); ++j) row(g.x[i], g.y[j], f(i, j, s));
      break;
  }
}

}  // namespace prandtl3d
