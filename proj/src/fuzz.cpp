#include "hpl/fuzz.hpp"

#include <cmath>

#include "hpl/errors.hpp"

namespace hpl {

CubeFunctiond random_cube_function(const RandomFunctionSpec& spec, RngCursor& rng) {
  detail::check_cube_dim(spec.n, kMaxCubeDim);
  detail::require(spec.d >= 1, "target dimension must be >= 1");
  detail::require(spec.density >= 0.0 && spec.density <= 1.0, "density must lie in [0, 1]");
  const std::uint32_t size = 1u << spec.n;
  Eigen::MatrixXd coefficients = Eigen::MatrixXd::Zero(spec.d, size);
  for (std::uint32_t s = 0; s < size; ++s) {
    const bool kept = (s != 0 || spec.include_mean) &&
                      (!spec.degree_cap || popcount(s) <= *spec.degree_cap) && rng.uniform() < spec.density;
    for (Eigen::Index i = 0; i < spec.d; ++i) {
      const double c = rng.uniform(-spec.amplitude, spec.amplitude);
      if (kept) coefficients(i, s) = c;
    }
  }
  CubeFunctiond f = inverse_walsh_transform(WalshSpectrumd(spec.n, std::move(coefficients)));
  if (spec.normalize) {
    const double scale = f.max_point_norm();
    if (scale > 0.0) f *= 1.0 / scale;
  }
  return f;
}

nlohmann::json to_json(const RandomFunctionSpec& spec) {
  nlohmann::json out = {{"n", spec.n},
                        {"d", spec.d},
                        {"density", spec.density},
                        {"amplitude", spec.amplitude},
                        {"include_mean", spec.include_mean},
                        {"normalize", spec.normalize}};
  out["degree_cap"] = spec.degree_cap ? nlohmann::json(*spec.degree_cap) : nlohmann::json(nullptr);
  return out;
}

NormSpec random_norm(const std::vector<std::string>& names, Eigen::Index d, RngCursor& rng) {
  detail::require(!names.empty(), "norm list is empty");
  const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(names.size()));
  return NormSpec::parse(names[std::min(k, names.size() - 1)], d);
}

ConvexGauge random_max_affine(Eigen::Index d, int max_pieces, RngCursor& rng) {
  detail::require(max_pieces >= 1, "max_affine needs at least one piece");
  const int pieces = 1 + std::min(max_pieces - 1, static_cast<int>(rng.uniform() * max_pieces));
  Eigen::MatrixXd a(d, pieces);
  Eigen::VectorXd b(pieces);
  for (int k = 0; k < pieces; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) a(i, k) = rng.uniform(-1.0, 1.0);
    b(k) = rng.uniform(-1.0, 1.0);
  }
  return ConvexGauge::max_affine(std::move(a), std::move(b));
}

int uniform_int(RngCursor& rng, int lo, int hi) {
  const int span = hi - lo + 1;
  return lo + std::min(span - 1, static_cast<int>(rng.uniform() * span));
}

FuzzInstance make_fuzz_instance(const FuzzCorpusConfig& config, std::uint64_t index) {
  detail::require(config.n_min >= 1 && config.n_min <= config.n_max, "invalid n range");
  detail::require(config.d_min >= 1 && config.d_min <= config.d_max, "invalid d range");
  detail::require(config.p_min >= 1.0 && config.p_min <= config.p_max, "invalid p range");
  RngCursor rng(CounterRng(config.seed, 0x66757a7a).substream(index));

  RandomFunctionSpec spec;
  spec.n = uniform_int(rng, config.n_min, config.n_max);
  spec.d = uniform_int(rng, static_cast<int>(config.d_min), static_cast<int>(config.d_max));
  const int cap = uniform_int(rng, 1, spec.n + 1);
  if (cap <= spec.n) spec.degree_cap = cap;
  spec.density = rng.uniform() < 0.5 ? 1.0 : rng.uniform(0.2, 1.0);

  CubeFunctiond f = random_cube_function(spec, rng);
  NormSpec norm = random_norm(config.norms, spec.d, rng);
  const double p = rng.uniform(config.p_min, config.p_max);
  const bool affine = rng.uniform() < config.max_affine_share;
  ConvexGauge gauge = affine ? random_max_affine(spec.d, config.max_pieces, rng) : ConvexGauge::norm_power(norm, p);
  return {index, spec, std::move(f), norm, p, std::move(gauge)};
}

}  // namespace hpl
