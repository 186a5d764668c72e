#include "knn/xxz_chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <random>
#include <string>

#include "knn/eigensolver.hpp"
#include "knn/error.hpp"
#include "knn/parallel.hpp"
#include "knn/seeding.hpp"
#include "knn/surmise.hpp"

namespace knn::xxz {

void ChainSpec::validate() const {
  if (length < 2 || length % 2 != 0) throw ValidationError("chain length must be even and >= 2");
  if (length > max_length) {
    throw ValidationError("chain length " + std::to_string(length) + " exceeds the configured maximum " +
                          std::to_string(max_length));
  }
  if (!(disorder >= 0.0)) throw ValidationError("disorder width must be >= 0");
  if (!std::isfinite(jz)) throw ValidationError("Jz must be finite");
}

SectorBasis::SectorBasis(int length) : length_(length) {
  if (length < 2 || length > 20 || length % 2 != 0)
    throw ValidationError("sector basis needs even L in [2, 20], got " + std::to_string(length));
  const auto n = static_cast<std::size_t>(length);
  binom_.assign(n + 1, std::vector<std::size_t>(n + 2, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    binom_[i][0] = 1;
    for (std::size_t j = 1; j <= i; ++j) binom_[i][j] = binom_[i - 1][j - 1] + (j <= i - 1 ? binom_[i - 1][j] : 0);
  }
  const int up = length / 2;
  states_.reserve(binom_[n][n / 2]);
  // Gosper's hack walks fixed-popcount integers in increasing order.
  std::uint32_t s = (1u << up) - 1u;
  const std::uint32_t limit = 1u << length;
  while (s < limit) {
    states_.push_back(s);
    const std::uint32_t c = s & (~s + 1u);
    const std::uint32_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

std::size_t SectorBasis::rank(std::uint32_t state) const {
  std::size_t r = 0;
  std::size_t j = 1;
  for (int pos = 0; pos < length_; ++pos) {
    if (state & (1u << pos)) {
      if (j <= static_cast<std::size_t>(pos)) r += binom_[static_cast<std::size_t>(pos)][j];
      ++j;
    }
  }
  return r;
}

SectorBasis build_basis(int length) { return SectorBasis(length); }

std::vector<double> disorder_fields(const ChainSpec& spec, std::size_t realization_index) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, realization_index));
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> h(static_cast<std::size_t>(spec.length));
  for (double& x : h) x = spec.disorder * u(rng);
  return h;
}

std::vector<double> build_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> fields) {
  spec.validate();
  if (basis.length() != spec.length) throw ValidationError("basis length does not match the chain");
  if (fields.size() != static_cast<std::size_t>(spec.length)) throw ValidationError("need one field per site");
  const std::size_t dim = basis.size();
  std::vector<double> h(dim * dim, 0.0);
  const int bonds = spec.length - 1;  // open chain
  for (std::size_t a = 0; a < dim; ++a) {
    const std::uint32_t s = basis.state(a);
    double diag = 0.0;
    for (int n = 0; n < spec.length; ++n) {
      const double zn = (s >> n) & 1u ? 0.5 : -0.5;
      diag += fields[static_cast<std::size_t>(n)] * zn;
      if (n < bonds) {
        const double zm = (s >> (n + 1)) & 1u ? 0.5 : -0.5;
        diag += spec.jz * zn * zm;
        if (zn != zm) {
          const std::uint32_t flipped = s ^ (3u << n);
          const std::size_t b = basis.rank(flipped);
          h[a * dim + b] = 0.5;
        }
      }
    }
    h[a * dim + a] = diag;
  }
  return h;
}

std::vector<double> build_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::size_t realization_index) {
  const auto fields = disorder_fields(spec, realization_index);
  return build_hamiltonian(spec, basis, fields);
}

SpectrumSample spectrum(const ChainSpec& spec, const SectorBasis& basis, std::size_t realization_index) {
  auto h = build_hamiltonian(spec, basis, realization_index);
  SpectrumSample s;
  s.model = "xxz";
  s.seed = derive_seed(spec.seed, realization_index);
  s.realization_index = realization_index;
  s.levels = linalg::symmetric_eigenvalues(h, basis.size());
  return s;
}

SpectrumSample spectrum(const ChainSpec& spec, std::size_t realization_index) {
  spec.validate();
  const SectorBasis basis(spec.length);
  return spectrum(spec, basis, realization_index);
}

SweepPoint analyze_point(double disorder, std::span<const unfolding::UnfoldedSpectrum> unfolded,
                         const SweepOptions& opts) {
  SweepPoint pt;
  pt.disorder = disorder;
  pt.n_realizations = unfolded.size();
  for (const auto& u : unfolded) {
    pt.retained.push_back(u.levels.size());
    if (u.fell_back) ++pt.n_fallbacks;
  }

  const auto summaries = stats::knn_moments(unfolded, 1, opts.k_max);
  for (int k = 1; k <= opts.k_max; ++k) {
    SweepRow row;
    row.k = k;
    row.moments = summaries[static_cast<std::size_t>(k - 1)];
    const auto set = stats::knn_spacings(unfolded, k);
    const auto goe = surmise::Surmise::corrected(k, 1);
    const auto poisson = surmise::Surmise::poisson_knn(k);
    // One histogram range wide enough for both references.
    const auto r_goe = stats::default_histogram_range(k, surmise::rmt_variance(k, 1));
    const auto r_poi = stats::default_histogram_range(k, static_cast<double>(k));
    const stats::HistogramRange range{std::min(r_goe.lo, r_poi.lo), std::max(r_goe.hi, r_poi.hi)};
    const auto hist = stats::build_histogram(set, opts.bin_width, range);
    row.sigma_vs_goe = gof::sigma_gof(hist, goe, opts.window_sigmas).sigma;
    row.sigma_vs_poisson = gof::sigma_gof(hist, poisson, opts.window_sigmas).sigma;
    if (std::find(opts.histogram_ks.begin(), opts.histogram_ks.end(), k) != opts.histogram_ks.end())
      pt.histograms.emplace(k, hist);
    pt.rows.push_back(row);
  }

  auto nv_opts = opts.nv;
  nv_opts.L_max = std::max(nv_opts.L_max, static_cast<double>(opts.k_max));
  pt.nv = stats::number_variance(unfolded, nv_opts);
  pt.gaps = stats::delta_sigma_gap(summaries, 1, pt.nv);
  return pt;
}

SweepResult disorder_sweep(const ChainSpec& spec_template, std::span<const double> disorder_list,
                           std::size_t n_realizations, const SweepOptions& opts, const RealizationHook& hook) {
  if (disorder_list.empty()) throw ValidationError("disorder list is empty");
  if (n_realizations == 0) throw ValidationError("need at least one realization");
  spec_template.validate();
  const SectorBasis basis(spec_template.length);

  SweepResult result;
  result.spec = spec_template;
  for (double w : disorder_list) {
    ChainSpec spec = spec_template;
    spec.disorder = w;
    spec.validate();
    std::vector<unfolding::UnfoldedSpectrum> unfolded(n_realizations);
    std::mutex hook_mutex;
    parallel_for(n_realizations, [&](std::size_t r) {
      const auto sample = spectrum(spec, basis, r);
      if (hook) {
        const auto fields = disorder_fields(spec, r);
        const std::lock_guard lock(hook_mutex);
        hook(sample, fields);
      }
      unfolded[r] = unfolding::unfold_polynomial(sample, opts.unfold);
    });
    result.points.push_back(analyze_point(w, unfolded, opts));
  }
  return result;
}

}  // namespace knn::xxz
