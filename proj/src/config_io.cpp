#include "nlwave/config_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nlwave/experiments.hpp"
#include "nlwave/expr.hpp"

namespace nlwave {

namespace {

constexpr char kKernelMagic[8] = {'N', 'L', 'W', 'K', 'E', 'R', 'N', '1'};

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

Real get_number(const nlohmann::json& obj, const std::string& key, Real fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_error("'" + key + "' must be a number");
  return obj[key].get<Real>();
}

// Samples a pointwise expression of the domain coordinates on the grid and
// projects onto the retained modes.
Vector project_expression(const SpectralBasis& basis, const Expr& expr) {
  Vector values(basis.grid_points());
  if (basis.dim == 1) {
    for (Index i = 0; i < basis.grid[0].size(); ++i)
      values[i] = expr.eval1(basis.grid[0][i]);
  } else {
    const Index n1 = basis.grid[1].size();
    for (Index i0 = 0; i0 < basis.grid[0].size(); ++i0)
      for (Index i1 = 0; i1 < n1; ++i1)
        values[i0 * n1 + i1] = expr.eval2(basis.grid[0][i0], basis.grid[1][i1]);
  }
  return to_modal(basis, values);
}

Kernel parse_kernel(const nlohmann::json& spec, const SpectralBasis& basis,
                    const std::filesystem::path& base_dir) {
  if (spec.is_null()) return Kernel::zero(basis);
  const std::string type = spec.value("type", "zero");
  if (type == "zero") return Kernel::zero(basis);
  if (type == "separable") {
    if (!spec.contains("terms") || !spec["terms"].is_array())
      config_error("kernel.terms must be an array");
    std::vector<Kernel::SeparableTerm> terms;
    for (const auto& jt : spec["terms"]) {
      Kernel::SeparableTerm term;
      term.coeff = get_number(jt, "coeff", 1.0);
      const std::vector<std::string> vars =
          basis.dim == 1 ? std::vector<std::string>{"x"}
                         : std::vector<std::string>{"x", "y"};
      const Expr g = Expr::parse(jt.value("g", ""), vars);
      const Expr h = Expr::parse(jt.value("h", ""), vars);
      term.g = [g](Real x, Real y) {
        return g.arity() == 1 ? g.eval1(x) : g.eval2(x, y);
      };
      term.h = [h](Real x, Real y) {
        return h.arity() == 1 ? h.eval1(x) : h.eval2(x, y);
      };
      terms.push_back(std::move(term));
    }
    return Kernel::separable(basis, terms);
  }
  if (type == "matrix_file") {
    if (!spec.contains("path")) config_error("kernel.path is required");
    std::filesystem::path path = spec["path"].get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    Matrix m = load_kernel_matrix_file(path);
    if (m.rows() != basis.total_modes())
      config_error("kernel matrix size does not match the basis");
    return Kernel::from_matrix(std::move(m));
  }
  config_error("unknown kernel type '" + type + "'");
}

Nonlinearity parse_nonlinearity(const nlohmann::json& spec) {
  if (spec.is_null()) return Nonlinearity::zero();
  const std::string kind = spec.value("kind", "zero");
  const int N = spec.value("N", 3);
  if (kind == "zero") return Nonlinearity::zero();
  if (kind == "odd_polynomial") {
    if (!spec.contains("coeffs") || !spec["coeffs"].is_array())
      config_error("nonlinearity.coeffs must be an array");
    std::vector<Real> coeffs = spec["coeffs"].get<std::vector<Real>>();
    Nonlinearity nl = Nonlinearity::odd_polynomial(std::move(coeffs), N);
    if (spec.contains("mu")) nl.mu = spec["mu"].get<Real>();
    return nl;
  }
  if (kind == "custom_pointwise") {
    if (!spec.contains("f") || !spec.contains("F"))
      config_error("custom_pointwise nonlinearity requires both f and F");
    const Expr f = Expr::parse(spec["f"].get<std::string>(), {"s"});
    const Expr F = Expr::parse(spec["F"].get<std::string>(), {"s"});
    std::function<Real(Real)> fprime;
    if (spec.contains("fprime")) {
      const Expr fp = Expr::parse(spec["fprime"].get<std::string>(), {"s"});
      fprime = [fp](Real s) { return fp.eval1(s); };
    }
    return Nonlinearity::custom([f](Real s) { return f.eval1(s); },
                                [F](Real s) { return F.eval1(s); }, N,
                                get_number(spec, "mu", 0.0), std::move(fprime));
  }
  config_error("unknown nonlinearity kind '" + kind + "'");
}

}  // namespace

nlohmann::json LoadedConfig::section(const std::string& name) const {
  if (raw.contains(name)) return raw[name];
  return nlohmann::json::object();
}

void apply_override(nlohmann::json& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    config_error("override must look like path.to.key=value: '" + assignment +
                 "'");
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  nlohmann::json* node = &config;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty()) config_error("empty key in override path '" + path + "'");
    if (dot == std::string::npos) {
      nlohmann::json value = nlohmann::json::parse(value_text, nullptr, false);
      if (value.is_discarded()) value = value_text;  // treat as a string
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

Vector parse_vector_spec(const nlohmann::json& spec, const SpectralBasis& basis,
                         Rng* rng, const std::string& what) {
  const Index n = basis.total_modes();
  if (spec.is_null()) return Vector::Zero(n);
  const std::string type = spec.value("type", "zero");
  if (type == "zero") return Vector::Zero(n);
  if (type == "modal_list") {
    if (!spec.contains("coeffs") || !spec["coeffs"].is_array())
      config_error(what + ".coeffs must be an array");
    const auto coeffs = spec["coeffs"].get<std::vector<Real>>();
    if (static_cast<Index>(coeffs.size()) > n)
      config_error(what + ": more coefficients than retained modes");
    Vector v = Vector::Zero(n);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      v[static_cast<Index>(i)] = coeffs[i];
    return v;
  }
  if (type == "pointwise_expr") {
    if (!spec.contains("expr")) config_error(what + ".expr is required");
    const std::vector<std::string> vars =
        basis.dim == 1 ? std::vector<std::string>{"x"}
                       : std::vector<std::string>{"x", "y"};
    return project_expression(basis,
                              Expr::parse(spec["expr"].get<std::string>(), vars));
  }
  if (type == "random") {
    if (rng == nullptr) config_error(what + ": random spec needs a seed context");
    const Real amplitude = get_number(spec, "amplitude", 1.0);
    Vector v(n);
    for (Index j = 0; j < n; ++j)
      v[j] = amplitude * rng->normal() / static_cast<Real>(j + 1);
    return v;
  }
  config_error("unknown " + what + " type '" + type + "'");
}

State parse_initial_state(const nlohmann::json& spec, const SpectralBasis& basis,
                          Rng& rng) {
  if (spec.is_null()) return State::zero(basis);
  const std::string type = spec.value("type", "zero");
  if (type == "zero") return State::zero(basis);
  if (type == "random")
    return random_h1_state(basis, get_number(spec, "energy", 1.0), rng);
  if (type == "modal") {
    State s = State::zero(basis);
    auto fill = [&](const char* key, Vector& dst) {
      if (!spec.contains(key)) return;
      const auto coeffs = spec[key].get<std::vector<Real>>();
      if (static_cast<Index>(coeffs.size()) > dst.size())
        config_error("initial: more coefficients than retained modes");
      for (std::size_t i = 0; i < coeffs.size(); ++i)
        dst[static_cast<Index>(i)] = coeffs[i];
    };
    fill("a", s.a);
    fill("b", s.b);
    return s;
  }
  config_error("unknown initial state type '" + type + "'");
}

LoadedConfig build_config(nlohmann::json config,
                          const std::filesystem::path& base_dir) {
  LoadedConfig loaded;

  if (!config.contains("basis")) config_error("missing 'basis' section");
  const auto& jb = config["basis"];
  const int dim = jb.value("dim", 1);
  const Index modes = jb.value("modes", Index{0});
  std::vector<Real> lengths;
  if (jb.contains("lengths"))
    lengths = jb["lengths"].get<std::vector<Real>>();
  else
    lengths.assign(static_cast<std::size_t>(dim), M_PI);
  loaded.basis = build_basis(dim, modes, lengths);

  const auto jp = config.value("physics", nlohmann::json::object());
  loaded.physics.k = get_number(jp, "k", 1.0);
  loaded.physics.p = get_number(jp, "p", 2.0);
  loaded.physics.kernel = parse_kernel(jp.value("kernel", nlohmann::json()),
                                       loaded.basis, base_dir);
  loaded.physics.h = parse_vector_spec(jp.value("h", nlohmann::json()),
                                       loaded.basis, nullptr, "h");
  loaded.physics.nonlinearity =
      parse_nonlinearity(jp.value("nonlinearity", nlohmann::json()));
  loaded.physics.validate(loaded.basis);

  const auto js = config.value("step", nlohmann::json::object());
  loaded.step.dt = get_number(js, "dt", 1e-2);
  loaded.step.scheme = js.value("scheme", "strang");
  loaded.step.radial_tol = get_number(js, "radial_tol", 1e-13);
  loaded.step.radial_max_iter = js.value("radial_max_iter", 200);
  loaded.step.validate();

  loaded.seed = config.value("seed", std::uint64_t{0});
  loaded.raw = std::move(config);
  loaded.digest = digest_hex(loaded.raw.dump());
  return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path,
                         const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    config_error(path.string() + ": " + err.what());
  }
  for (const auto& assignment : overrides) apply_override(config, assignment);
  if (seed_override) config["seed"] = *seed_override;
  return build_config(std::move(config), path.parent_path());
}

nlohmann::json default_config_json() {
  return nlohmann::json{
      {"basis", {{"dim", 1}, {"modes", 32}, {"lengths", {M_PI}}}},
      {"physics",
       {{"k", 1.0},
        {"p", 2.0},
        {"kernel", {{"type", "zero"}}},
        {"h", {{"type", "zero"}}},
        {"nonlinearity",
         {{"kind", "odd_polynomial"}, {"coeffs", {0.0, 1.0}}, {"N", 3}}}}},
      {"step", {{"dt", 1e-2}}},
      {"simulate",
       {{"T", 10.0},
        {"record_stride", 10},
        {"snapshot_stride", 0},
        {"initial", {{"type", "random"}, {"energy", 1.0}}}}},
      {"seed", 1}};
}

Matrix load_kernel_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open kernel matrix file " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() == 8 && std::memcmp(magic, kKernelMagic, 8) == 0) {
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in || rows == 0 || cols == 0 || rows != cols)
      config_error("kernel matrix file " + path.string() + ": bad dimensions");
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    RowMatrix buffer(static_cast<Index>(rows), static_cast<Index>(cols));
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(Real)));
    if (!in)
      config_error("kernel matrix file " + path.string() + ": truncated");
    m = buffer;
    return m;
  }

  // Plain text: rows of whitespace-separated numbers, row-major.
  in.clear();
  in.seekg(0);
  std::vector<std::vector<Real>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Real> row;
    Real value;
    while (ls >> value) row.push_back(value);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty())
    config_error("kernel matrix file " + path.string() + ": empty");
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols)
      config_error("kernel matrix file " + path.string() + ": ragged rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

void write_kernel_matrix_file(const std::filesystem::path& path,
                              const Matrix& matrix, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) config_error("cannot open " + path.string() + " for writing");
  if (binary) {
    out.write(kKernelMagic, sizeof(kKernelMagic));
    const std::uint64_t rows = static_cast<std::uint64_t>(matrix.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(matrix.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    const RowMatrix buffer = matrix;
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(rows * cols * sizeof(Real)));
  } else {
    out.precision(17);
    for (Index i = 0; i < matrix.rows(); ++i) {
      for (Index j = 0; j < matrix.cols(); ++j)
        out << matrix(i, j) << (j + 1 == matrix.cols() ? "" : " ");
      out << "\n";
    }
  }
  if (!out) config_error("write failed for " + path.string());
}

}  // namespace nlwave
