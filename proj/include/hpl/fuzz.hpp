#pragma once

// Reproducible random instances: functions on the cube, norms and gauges.
// Instance i of a corpus depends only on (seed, i).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpl/cube.hpp"
#include "hpl/gauge.hpp"
#include "hpl/norms.hpp"
#include "hpl/random.hpp"

namespace hpl {

/// Walsh coefficients f^(S) uniform on [-amplitude, amplitude]^d, zero for
/// |S| > degree_cap and with probability 1 - density otherwise.
struct RandomFunctionSpec {
  int n = 4;
  Eigen::Index d = 1;
  std::optional<int> degree_cap;
  double density = 1.0;
  double amplitude = 1.0;
  bool include_mean = true;
  /// Rescale so that max_x ||f(x)||_2 = 1.
  bool normalize = true;
};

/// Uniform integer in [lo, hi].
int uniform_int(RngCursor& rng, int lo, int hi);

CubeFunctiond random_cube_function(const RandomFunctionSpec& spec, RngCursor& rng);
nlohmann::json to_json(const RandomFunctionSpec& spec);

/// Uniform choice among `names` (each parsed by NormSpec::parse).
NormSpec random_norm(const std::vector<std::string>& names, Eigen::Index d, RngCursor& rng);

/// max_k (<a_k, x> + b_k) with 1..max_pieces pieces, entries uniform on [-1, 1].
ConvexGauge random_max_affine(Eigen::Index d, int max_pieces, RngCursor& rng);

struct FuzzCorpusConfig {
  int n_min = 1;
  int n_max = 6;
  Eigen::Index d_min = 1;
  Eigen::Index d_max = 3;
  double p_min = 1.0;
  double p_max = 3.0;
  std::vector<std::string> norms{"l1", "l2", "linf"};
  /// Probability of a max-affine gauge instead of a norm power.
  double max_affine_share = 0.3;
  int max_pieces = 4;
  std::uint64_t seed = 0;
};

struct FuzzInstance {
  std::uint64_t index = 0;
  RandomFunctionSpec function_spec;
  CubeFunctiond f;
  NormSpec norm;
  double p = 1.0;
  ConvexGauge gauge;
};

FuzzInstance make_fuzz_instance(const FuzzCorpusConfig& config, std::uint64_t index);

}  // namespace hpl
