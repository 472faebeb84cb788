#include "hpl/clt_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hpl/biased_measure.hpp"
#include "hpl/errors.hpp"
#include "hpl/inequality_lab.hpp"
#include "hpl/parallel.hpp"
#include "hpl/summation.hpp"

namespace hpl {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::uint64_t kBlock = 2048;
constexpr std::uint64_t kMinSamples = 1000;

// Runs body(s) for every sample index, in fixed blocks spread over workers.
void for_each_sample(std::uint64_t samples, const std::function<void(std::uint64_t)>& body) {
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::uint64_t end = std::min<std::uint64_t>(samples, (b + 1) * kBlock);
    for (std::uint64_t s = b * kBlock; s < end; ++s) body(s);
  });
}

VectorXd mean_of_columns(const MatrixXd& columns) {
  PairwiseAccumulator<double> acc(columns.rows());
  for (Eigen::Index s = 0; s < columns.cols(); ++s) acc.add(columns.col(s));
  return acc.result() / static_cast<double>(columns.cols());
}

// P{Bin(N, 1/2) <= k} for k = 0..N.
std::vector<double> fair_binomial_cdf(int copies) {
  std::vector<double> cdf(static_cast<std::size_t>(copies) + 1);
  double acc = 0.0;
  const double log_total = copies * std::log(2.0);
  for (int k = 0; k <= copies; ++k) {
    acc += std::exp(std::lgamma(copies + 1.0) - std::lgamma(k + 1.0) - std::lgamma(copies - k + 1.0) - log_total);
    cdf[static_cast<std::size_t>(k)] = acc;
  }
  return cdf;
}

int quantile_from_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

// Smallest c with P{Bin(count, p_minus) <= c} >= u.
int biased_binomial_quantile(int count, double p_minus, double p_plus, double u) {
  double pmf = std::pow(p_plus, count);
  double cdf = pmf;
  const double odds = p_minus / p_plus;
  int c = 0;
  while (cdf < u && c < count) {
    pmf *= static_cast<double>(count - c) / static_cast<double>(c + 1) * odds;
    ++c;
    cdf += pmf;
  }
  return c;
}

}  // namespace

SmoothFunction SmoothFunction::linear(const MatrixXd& a) {
  detail::require(a.rows() >= 1 && a.cols() >= 1, "linear map needs a nonempty matrix");
  SmoothFunction f;
  f.n = static_cast<int>(a.cols());
  f.d = a.rows();
  f.value = [a](const VectorXd& x) -> VectorXd { return a * x; };
  f.jacobian = [a](const VectorXd&) -> MatrixXd { return a; };
  f.lipschitz = a.operatorNorm();
  f.support_radius = std::numeric_limits<double>::infinity();
  f.name = "linear";
  return f;
}

SmoothFunction SmoothFunction::constant(int n, const VectorXd& c) {
  detail::require(n >= 1 && c.size() >= 1, "constant map needs n >= 1 and d >= 1");
  SmoothFunction f;
  f.n = n;
  f.d = c.size();
  f.value = [c](const VectorXd&) -> VectorXd { return c; };
  f.jacobian = [d = c.size(), n](const VectorXd&) -> MatrixXd { return MatrixXd::Zero(d, n); };
  f.lipschitz = 0.0;
  f.support_radius = std::numeric_limits<double>::infinity();
  f.name = "constant";
  return f;
}

SmoothFunction SmoothFunction::sine() {
  SmoothFunction f;
  f.value = [](const VectorXd& x) -> VectorXd { return VectorXd::Constant(1, std::sin(x(0))); };
  f.jacobian = [](const VectorXd& x) -> MatrixXd { return MatrixXd::Constant(1, 1, std::cos(x(0))); };
  f.lipschitz = 1.0;
  f.support_radius = std::numeric_limits<double>::infinity();
  f.name = "sin";
  return f;
}

SmoothFunction SmoothFunction::tanh_map(int n) {
  detail::require(n >= 1, "tanh map needs n >= 1");
  SmoothFunction f;
  f.n = n;
  f.d = n;
  f.value = [](const VectorXd& x) -> VectorXd { return x.array().tanh().matrix(); };
  f.jacobian = [](const VectorXd& x) -> MatrixXd {
    const Eigen::ArrayXd t = x.array().tanh();
    return (1.0 - t * t).matrix().asDiagonal();
  };
  f.lipschitz = 1.0;
  f.support_radius = std::numeric_limits<double>::infinity();
  f.name = "tanh";
  return f;
}

SmoothFunction SmoothFunction::square() {
  SmoothFunction f;
  f.value = [](const VectorXd& x) -> VectorXd { return VectorXd::Constant(1, x(0) * x(0)); };
  f.jacobian = [](const VectorXd& x) -> MatrixXd { return MatrixXd::Constant(1, 1, 2.0 * x(0)); };
  f.lipschitz = std::numeric_limits<double>::infinity();
  f.support_radius = std::numeric_limits<double>::infinity();
  f.name = "square";
  return f;
}

double jacobian_check(const SmoothFunction& f, RngCursor& rng, int points) {
  double worst = 0.0;
  VectorXd x(f.n);
  for (int k = 0; k < points; ++k) {
    for (int i = 0; i < f.n; ++i) x(i) = 2.0 * rng.normal();
    const MatrixXd jac = f.jacobian(x);
    for (int i = 0; i < f.n; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x(i)));
      VectorXd up = x, down = x;
      up(i) += h;
      down(i) -= h;
      const VectorXd fd = (f.value(up) - f.value(down)) / (2.0 * h);
      for (Eigen::Index r = 0; r < f.d; ++r)
        worst = std::max(worst, std::abs(fd(r) - jac(r, i)) / std::max(1.0, std::abs(jac(r, i))));
    }
  }
  return worst;
}

EmbeddedFunction::EmbeddedFunction(SmoothFunction f, int copies)
    : f_(std::move(f)), copies_(copies), scale_(1.0 / std::sqrt(static_cast<double>(copies))) {
  detail::require(copies_ >= 1, "N must be >= 1");
  detail::require(f_.n >= 1 && f_.d >= 1 && f_.value && f_.jacobian, "smooth function is incomplete");
}

VectorXd EmbeddedFunction::point(const Eigen::VectorXi& sums) const { return sums.cast<double>() * scale_; }

VectorXd EmbeddedFunction::value_at_sums(const Eigen::VectorXi& sums) const { return f_.value(point(sums)); }

VectorXd EmbeddedFunction::derivative_at_sums(const Eigen::VectorXi& sums, int i, int sign) const {
  Eigen::VectorXi flipped = sums;
  flipped(i) -= 2 * sign;
  return 0.5 * (f_.value(point(sums)) - f_.value(point(flipped)));
}

VectorXd EmbeddedFunction::operator()(const Eigen::MatrixXi& eps) const {
  detail::require(eps.rows() == f_.n && eps.cols() == copies_, "sign array must be n x N");
  return value_at_sums(eps.rowwise().sum());
}

VectorXd EmbeddedFunction::derivative(const Eigen::MatrixXi& eps, int i, int j) const {
  detail::require(eps.rows() == f_.n && eps.cols() == copies_, "sign array must be n x N");
  detail::require(i >= 0 && i < f_.n && j >= 0 && j < copies_, "coordinate out of range");
  return derivative_at_sums(eps.rowwise().sum(), i, eps(i, j));
}

CubeFunctiond EmbeddedFunction::tabulate() const {
  const int n = dim();
  detail::check_cube_dim(n, kMaxCubeDim);
  return CubeFunctiond::tabulate(n, f_.d, [&](CubePoint x) {
    Eigen::VectorXi sums = Eigen::VectorXi::Zero(f_.n);
    for (int i = 0; i < f_.n; ++i)
      for (int j = 0; j < copies_; ++j) sums(i) += x.sign(i * copies_ + j);
    return value_at_sums(sums);
  });
}

EmbeddedFunction build_fN(const SmoothFunction& f, int copies) { return {f, copies}; }

double derivative_asymptotic_constant(const EmbeddedFunction& fN, RngCursor& rng, int samples) {
  const int n = fN.groups();
  const int copies = fN.copies();
  const double root = std::sqrt(static_cast<double>(copies));
  double worst = 0.0;
  Eigen::MatrixXi eps(n, copies);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < copies; ++j) eps(i, j) = rng.uniform_sign();
    const Eigen::VectorXi sums = eps.rowwise().sum();
    const MatrixXd jac = fN.base().jacobian(sums.cast<double>() / root);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < copies; ++j) {
        const VectorXd exact = fN.derivative_at_sums(sums, i, eps(i, j));
        const VectorXd first_order = (eps(i, j) / root) * jac.col(i);
        worst = std::max(worst, copies * (exact - first_order).norm());
      }
  }
  return worst;
}

InequalityReport gaussian_pisier_sides(const GaussianPisierQuery& q) {
  const SmoothFunction& f = q.f;
  detail::require(f.value && f.jacobian, "smooth function is incomplete");
  detail::require(q.gauge.dim() == f.d, "gauge dimension does not match function target");
  detail::require(q.samples >= 2, "need at least two samples");
  const int n = f.n;
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t mean_seed = q.mean_seed.value_or(q.seed + 1);

  const CounterRng mean_rng(mean_seed, 0x67736d);
  MatrixXd values(f.d, static_cast<Eigen::Index>(q.samples));
  for_each_sample(q.samples, [&](std::uint64_t s) {
    VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = mean_rng.normal(s * un + static_cast<std::uint64_t>(i));
    values.col(static_cast<Eigen::Index>(s)) = f.value(g);
  });
  const VectorXd mean = mean_of_columns(values);

  const CounterRng lhs_rng(q.seed, 0x67736c), rhs_rng(q.seed, 0x677372);
  std::vector<double> lhs_samples(q.samples), rhs_samples(q.samples);
  for_each_sample(q.samples, [&](std::uint64_t s) {
    VectorXd g(n), gp(n);
    for (int i = 0; i < n; ++i) g(i) = lhs_rng.normal(s * un + static_cast<std::uint64_t>(i));
    lhs_samples[s] = q.gauge(f.value(g) - mean);
    for (int i = 0; i < n; ++i) {
      g(i) = rhs_rng.normal(2 * s * un + static_cast<std::uint64_t>(i));
      gp(i) = rhs_rng.normal(2 * s * un + un + static_cast<std::uint64_t>(i));
    }
    rhs_samples[s] = q.gauge(kHalfPi * (f.jacobian(g) * gp));
  });
  const auto lhs = sample_mean(lhs_samples);
  const auto rhs = sample_mean(rhs_samples);

  ReportParams params;
  params.n = n;
  params.d = static_cast<long>(f.d);
  params.gauge = q.gauge.name();
  if (const auto* np = q.gauge.as_norm_power()) {
    params.p = np->p;
    params.norm = np->norm.name();
  }
  params.seed = q.seed;
  params.method = Method::mc;
  params.extra["samples"] = q.samples;
  params.extra["mean_seed"] = mean_seed;
  params.extra["function"] = f.name;
  params.extra["lhs_std_error"] = lhs.std_error;
  params.extra["rhs_std_error"] = rhs.std_error;
  params.extra["high_variance"] = q.samples < kMinSamples;
  return make_report("gaussian_pisier", lhs.mean, rhs.mean, std::move(params),
                     std::hypot(lhs.std_error, rhs.std_error));
}

namespace {

struct CoupledSides {
  std::vector<double> lhs_cube, lhs_gauss, rhs_cube, rhs_gauss;
  explicit CoupledSides(std::uint64_t count)
      : lhs_cube(count), lhs_gauss(count), rhs_cube(count), rhs_gauss(count) {}
};

std::vector<double> differences(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

CltRow experiment_row(const SmoothFunction& f, const ConvexGauge& gauge, int copies, const MuQuadrature& quad,
                      const std::vector<BiasedCoordinateLaw>& laws, const CltConfig& config, std::uint64_t mean_seed) {
  const int n = f.n;
  const auto un = static_cast<std::uint64_t>(n);
  const auto m = static_cast<std::uint64_t>(quad.size());
  const EmbeddedFunction fN(f, copies);
  const auto cdf = fair_binomial_cdf(copies);
  const double root = std::sqrt(static_cast<double>(copies));
  const auto stream = static_cast<std::uint64_t>(copies);

  // Row sums S_i and Gaussian G_i from the same uniform, both increasing in it.
  auto coupled_point = [&](const CounterRng& rng, std::uint64_t s, Eigen::VectorXi& sums, VectorXd& g) {
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform(s * un + static_cast<std::uint64_t>(i));
      sums(i) = 2 * quantile_from_cdf(cdf, u) - copies;
      g(i) = normal_quantile(u);
    }
  };

  const CounterRng mean_rng = CounterRng(mean_seed, 0x636c6d).substream(stream);
  MatrixXd cube_values(f.d, static_cast<Eigen::Index>(config.samples));
  MatrixXd gauss_values(f.d, static_cast<Eigen::Index>(config.samples));
  for_each_sample(config.samples, [&](std::uint64_t s) {
    Eigen::VectorXi sums(n);
    VectorXd g(n);
    coupled_point(mean_rng, s, sums, g);
    cube_values.col(static_cast<Eigen::Index>(s)) = fN.value_at_sums(sums);
    gauss_values.col(static_cast<Eigen::Index>(s)) = f.value(g);
  });
  const VectorXd cube_mean = mean_of_columns(cube_values);
  const VectorXd gauss_mean = mean_of_columns(gauss_values);

  const CounterRng outer = CounterRng(config.seed, 0x636c6f).substream(stream);
  const CounterRng inner = CounterRng(config.seed, 0x636c69).substream(stream);
  CoupledSides sides(config.samples);
  for_each_sample(config.samples, [&](std::uint64_t s) {
    Eigen::VectorXi sums(n);
    VectorXd g(n);
    coupled_point(outer, s, sums, g);
    sides.lhs_cube[s] = gauge(fN.value_at_sums(sums) - cube_mean);
    sides.lhs_gauss[s] = gauge(f.value(g) - gauss_mean);

    // Inside row i, D_ij f_N takes one value on the K_i coordinates with
    // eps_ij = +1 and another on the rest, so only the number of biased
    // minus signs in each group matters.
    MatrixXd d_plus(f.d, n), d_minus(f.d, n);
    for (int i = 0; i < n; ++i) {
      d_plus.col(i) = fN.derivative_at_sums(sums, i, +1);
      d_minus.col(i) = fN.derivative_at_sums(sums, i, -1);
    }
    const MatrixXd jac = f.jacobian(g);
    double cube = 0.0;
    double gauss = 0.0;
    VectorXd cube_arg(f.d), gp(n);
    for (std::uint64_t k = 0; k < m; ++k) {
      const auto& law = laws[k];
      cube_arg.setZero();
      for (int i = 0; i < n; ++i) {
        const int plus_count = (sums(i) + copies) / 2;
        const int group[2] = {plus_count, copies - plus_count};
        double z = 0.0;
        for (int side = 0; side < 2; ++side) {
          const std::uint64_t counter = ((s * m + k) * un + static_cast<std::uint64_t>(i)) * 2 + side;
          const double u = inner.uniform(counter);
          const int minus = biased_binomial_quantile(group[side], law.p_minus, law.p_plus, u);
          const double x = (group[side] - minus) * law.delta_plus + minus * law.delta_minus;
          cube_arg += x * (side == 0 ? d_plus.col(i) : d_minus.col(i));
          z += std::sqrt(static_cast<double>(group[side])) * normal_quantile(1.0 - u);
        }
        gp(i) = z / root;
      }
      cube += quad.weights[k] * gauge(kHalfPi * cube_arg);
      gauss += quad.weights[k] * gauge(kHalfPi * (jac * gp));
    }
    sides.rhs_cube[s] = cube;
    sides.rhs_gauss[s] = gauss;
  });

  CltRow row;
  row.copies = copies;
  const auto lc = sample_mean(sides.lhs_cube), lg = sample_mean(sides.lhs_gauss);
  const auto rc = sample_mean(sides.rhs_cube), rg = sample_mean(sides.rhs_gauss);
  const auto ld = sample_mean(differences(sides.lhs_cube, sides.lhs_gauss));
  const auto rd = sample_mean(differences(sides.rhs_cube, sides.rhs_gauss));
  row.lhs_cube = lc.mean;
  row.lhs_cube_se = lc.std_error;
  row.lhs_gauss = lg.mean;
  row.lhs_gauss_se = lg.std_error;
  row.rhs_cube = rc.mean;
  row.rhs_cube_se = rc.std_error;
  row.rhs_gauss = rg.mean;
  row.rhs_gauss_se = rg.std_error;
  row.lhs_diff = ld.mean;
  row.lhs_diff_se = ld.std_error;
  row.rhs_diff = rd.mean;
  row.rhs_diff_se = rd.std_error;
  return row;
}

}  // namespace

CltTable clt_convergence_experiment(const SmoothFunction& f, const ConvexGauge& gauge, const CltConfig& config) {
  detail::require(f.value && f.jacobian, "smooth function is incomplete");
  detail::require(gauge.dim() == f.d, "gauge dimension does not match function target");
  detail::require(config.samples >= 2, "need at least two samples");
  detail::require(!config.copies.empty(), "N grid is empty");
  for (int c : config.copies) detail::require(c >= 1, "every N must be >= 1");
  const MuQuadrature quad = make_mu_quadrature(config.quad_nodes);
  std::vector<BiasedCoordinateLaw> laws;
  for (double t : quad.nodes) laws.push_back(make_law(t));

  CltTable table;
  table.seed = config.seed;
  table.mean_seed = config.mean_seed.value_or(config.seed + 1);
  table.samples = config.samples;
  table.quad_nodes = quad.size();
  table.function = f.name;
  table.gauge = gauge.name();
  for (int copies : config.copies)
    table.rows.push_back(experiment_row(f, gauge, copies, quad, laws, config, table.mean_seed));
  return table;
}

void write_csv(const CltTable& table, std::ostream& out) {
  out << "N,lhs_cube,rhs_cube,lhs_gauss,rhs_gauss,lhs_cube_se,rhs_cube_se,lhs_gauss_se,rhs_gauss_se,"
         "lhs_diff,lhs_diff_se,rhs_diff,rhs_diff_se\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : table.rows) {
    line.str("");
    line << r.copies << ',' << r.lhs_cube << ',' << r.rhs_cube << ',' << r.lhs_gauss << ',' << r.rhs_gauss << ','
         << r.lhs_cube_se << ',' << r.rhs_cube_se << ',' << r.lhs_gauss_se << ',' << r.rhs_gauss_se << ','
         << r.lhs_diff << ',' << r.lhs_diff_se << ',' << r.rhs_diff << ',' << r.rhs_diff_se << '\n';
    out << line.str();
  }
}

nlohmann::json to_json(const CltTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"N", r.copies},
                    {"lhs_cube", r.lhs_cube},
                    {"rhs_cube", r.rhs_cube},
                    {"lhs_gauss", r.lhs_gauss},
                    {"rhs_gauss", r.rhs_gauss},
                    {"lhs_cube_se", r.lhs_cube_se},
                    {"rhs_cube_se", r.rhs_cube_se},
                    {"lhs_gauss_se", r.lhs_gauss_se},
                    {"rhs_gauss_se", r.rhs_gauss_se},
                    {"lhs_diff", r.lhs_diff},
                    {"lhs_diff_se", r.lhs_diff_se},
                    {"rhs_diff", r.rhs_diff},
                    {"rhs_diff_se", r.rhs_diff_se}});
  return {{"name", "clt_convergence"},
          {"function", table.function},
          {"gauge", table.gauge},
          {"seed", table.seed},
          {"mean_seed", table.mean_seed},
          {"samples", table.samples},
          {"quad_nodes", table.quad_nodes},
          {"rows", std::move(rows)}};
}

}  // namespace hpl
