#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "monsel/oscillators.hpp"
#include "monsel/random.hpp"

namespace monsel {

struct MarginalNormal {
  std::string name;
  double mean = 0.0;
  double cov = 0.0;  // coefficient of variation, as a fraction

  double sd() const;
};

/// Independent normal marginals over the sampled coordinates:
/// (k, m, D) for model1, (k, m, D, k_f, m_f, D_f) for model2, where D is the
/// damping ratio. All coordinates are required to be positive.
struct PriorSpec {
  ModelId model = ModelId::model1;
  std::vector<MarginalNormal> marginals;

  std::size_t dim() const { return marginals.size(); }
  std::vector<std::string> names() const;
};

/// Sample matrix, one row per draw.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PriorSpec default_priors(ModelId id);

/// Throws on duplicate names, wrong count/order, or nonpositive mean/cov.
void validate(const PriorSpec& spec);

/// n independent rows. Rows with a nonpositive coordinate are redrawn; row i
/// draws from rng.substream(i), so results do not depend on evaluation order.
/// Throws InputError when more than half of all draws are rejected.
SampleMatrix sample_prior(const PriorSpec& spec, std::size_t n, const RandomStream& rng);

/// Sum of univariate normal log densities. The truncation constant is
/// omitted; it is a constant offset.
double log_prior_pdf(const PriorSpec& spec, std::span<const double> theta);

bool in_support(std::span<const double> theta);

/// Sampled coordinates to physical parameters: b = 2 D sqrt(k m), likewise
/// for the frame. The inverse is damping_ratio().
ModelParams to_physical(ModelId id, std::span<const double> theta);
double damping_ratio(double b, double k, double m);

}  // namespace monsel
