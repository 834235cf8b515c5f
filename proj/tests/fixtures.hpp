#pragma once

// Constructed datasets with known ground truth, shared by the autotune tests
// and the acceptance gate. Latencies here are injected, never measured.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "autospmv/overheads.hpp"
#include "autospmv/random.hpp"
#include "autospmv/sweep.hpp"

namespace fixtures {

using namespace autospmv;

/// Plausible feature vector for n rows averaging `avg` nonzeros.
inline SparsityFeatures features_for(double n, double avg, Rng& rng) {
  SparsityFeatures f;
  f.n = std::round(n);
  f.avg_nnz = avg;
  f.nnz = std::round(f.n * avg);
  f.var_nnz = avg * rng.uniform(0.0, 2.0);
  f.std_nnz = std::sqrt(f.var_nnz);
  f.ell_ratio = 1.0 / (1.0 + f.std_nnz);
  f.median = std::round(avg);
  f.mode = std::round(avg);
  return f;
}

using LatencyLaw = std::function<std::optional<double>(const SparsityFeatures&, const ConfigPoint&)>;

/// One record per (matrix, point); nullopt latency marks the point infeasible.
inline SweepDataset injected_dataset(const ConfigSpace& space,
                                     const std::vector<std::pair<std::string, SparsityFeatures>>& mats,
                                     const LatencyLaw& law) {
  SweepDataset ds;
  ds.machine = {"fixture", 1, "2026-01-01T00:00:00Z"};
  ds.space = space;
  for (const auto& [id, f] : mats) {
    for (const auto& p : space.enumerate()) {
      MeasurementRecord r;
      r.matrix_id = id;
      r.features = f;
      r.config = p;
      if (const auto lat = law(f, p)) {
        r.repetitions = 1;
        r.latency_seconds = *lat;
        r.mflops = 2.0 * f.nnz / (*lat * 1e6);
      } else {
        r.feasible = false;
      }
      ds.add(std::move(r));
    }
  }
  return ds;
}

/// Observations following f = b * nnz * (1 + eps_f), c(fmt) = a[fmt] * nnz *
/// (1 + eps_c), eps ~ N(0, noise); nnz log-uniform in [1e3, 1e7].
inline std::vector<OverheadObservation> law_observations(std::size_t count, double noise,
                                                         std::uint64_t seed) {
  const double a[4] = {2e-9, 5e-9, 8e-9, 6e-9};
  const double b = 1e-9;
  Rng rng(seed);
  std::vector<OverheadObservation> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double nnz = std::pow(10.0, rng.uniform(3.0, 7.0));
    const double avg = rng.uniform(2.0, 40.0);
    OverheadObservation o;
    o.matrix_id = "law" + std::to_string(i);
    o.features = features_for(nnz / avg, avg, rng);
    o.f_latency = b * o.features.nnz * (1.0 + noise * rng.normal());
    for (std::size_t k = 0; k < 4; ++k) {
      o.c_latency[k] = a[k] * o.features.nnz * (1.0 + noise * rng.normal());
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace fixtures
