#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcond/geometry.hpp"
#include "pcond/psolver.hpp"
#include "pcond/trace.hpp"
#include "pcond/wolff.hpp"

namespace pcond {

/// One forward solve retained by the oracle: the interior extension of a
/// normalized trace plus everything the pairings need downstream.
struct CachedSolve {
  std::vector<double> values;   // vertex field; boundary equals the trace exactly
  std::vector<Vec2> gradients;  // per-cell gradient of the field
  double energy = 0.0;          // unregularized energy == <L(f), f> on the normalized trace
  int iterations = 0;
};

/// Black-box evaluator of the boundary pairings <L_sigma(f), g>, the only
/// interface the reconstruction methods are allowed to see.
///
/// All pairings are computed on the normalized trace values; the caller
/// restores the true amplitude through homogeneity,
///   <L(m f), n g> = m^(p-1) n <L(f), g>  with m = exp(f.log_scale) etc.,
/// which keeps high-frequency probes away from floating-point overflow.
///
/// Queries with byte-identical values hit a cache (log_scale is deliberately
/// not part of the key, so sweeping a probe's half-space offset costs one
/// solve). Safe for concurrent pair() calls; entries are shared and
/// immutable once inserted.
class DnOracle {
 public:
  /// The oracle adopts the scene's p; config.p is overwritten.
  explicit DnOracle(ConductivityScene scene, SolverConfig config = {});

  /// Homogeneous-background oracle (sigma = 1 everywhere), the reference
  /// operator of every deficit and the extension solver of cross pairings.
  static DnOracle reference(std::shared_ptr<const TriMesh> mesh, double p,
                            SolverConfig config = {});

  const TriMesh& mesh() const { return *scene_.mesh; }
  const ConductivityScene& scene() const { return scene_; }
  double p() const { return scene_.p; }

  /// Number of actual forward solves performed (cache misses + extension
  /// solves). Cache hits do not increment it.
  std::size_t solve_count() const { return solve_count_.load(); }
  std::size_t cache_hit_count() const { return cache_hit_count_.load(); }

  /// Disabling the cache changes no returned value, only the solve count.
  void set_cache_enabled(bool enabled);

  /// The cached interior extension of a normalized trace.
  std::shared_ptr<const CachedSolve> solve(const BoundaryTrace& f) const;

  /// <L(f), f> on the normalized values: exactly the solution energy.
  double pair(const BoundaryTrace& f) const;

  /// <L(f), g> on the normalized values; g is extended to the interior by
  /// the sigma = 1 energy minimizer. g byte-identical to f reduces to pair(f).
  double pair(const BoundaryTrace& f, const BoundaryTrace& g) const;

  /// True-amplitude pairings exp(p ls_f) pair(f) and
  /// exp((p-1) ls_f + ls_g) pair(f, g); may overflow for extreme probes.
  double pair_scaled(const BoundaryTrace& f) const;
  double pair_scaled(const BoundaryTrace& f, const BoundaryTrace& g) const;

  /// Localized pairing <L_B(f), f>: the weighted energy density of this
  /// oracle's solution accumulated over the listed cells (in list order).
  double localized_pair(const BoundaryTrace& f, const std::vector<int>& cells) const;

 private:
  std::shared_ptr<const CachedSolve> extension(const BoundaryTrace& g) const;

  ConductivityScene scene_;
  SolverConfig config_;
  std::unique_ptr<PSolver> solver_;
  std::unique_ptr<PSolver> unit_solver_;  // null when sigma == 1 (solver_ serves both roles)
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::shared_ptr<const CachedSolve>> cache_;
  mutable std::unordered_map<std::string, std::shared_ptr<const CachedSolve>> extension_cache_;
  mutable std::atomic<std::size_t> solve_count_{0};
  mutable std::atomic<std::size_t> cache_hit_count_{0};
  bool cache_enabled_ = true;
};

/// <(L_a - L_b)(f), f> on the normalized trace, the raw material of every
/// indicator and comparison test. The two oracles must share mesh and p.
double deficit(const DnOracle& a, const DnOracle& b, const BoundaryTrace& f);

/// Weighted p-energy of one cell, the shared integrand of every localized
/// pairing. Kept to a single definition so that precomputed density tables
/// replay localized pairings bit for bit.
double cell_energy(double area, double sigma, const Vec2& grad, double p);

/// Linear combination of pairings  sum_i coeff_i <op_i(f), f>  evaluated on
/// one trace; op_i is a full DN pairing or a cell-localized one.
struct PairingExpr {
  struct Term {
    const DnOracle* oracle = nullptr;
    std::shared_ptr<const std::vector<int>> cells;  // null: full pairing
    double coeff = 1.0;
  };
  std::vector<Term> terms;

  double evaluate(const BoundaryTrace& f) const;
};

PairingExpr dn_term(const DnOracle& oracle, double coeff = 1.0);
PairingExpr localized_term(const DnOracle& oracle, std::vector<int> cells, double coeff = 1.0);
PairingExpr operator+(PairingExpr lhs, PairingExpr rhs);

/// A named boundary trace of the comparison dictionary.
struct DictionaryEntry {
  std::string id;
  BoundaryTrace trace;
};

struct DictionaryOptions {
  int directions = 16;       // oscillatory probe directions
  int tau_count = 6;         // frequencies per direction (capped by the mesh)
  int offsets = 3;           // half-space offsets per (direction, frequency)
  int random_profiles = 10;  // seeded smooth boundary profiles
  int fourier_modes = 4;     // harmonics per random profile
  unsigned seed = 0;
};

/// Default comparison dictionary: oscillatory probe traces over a direction
/// fan, the four affine profiles, and seeded random smooth profiles.
std::vector<DictionaryEntry> make_dictionary(const TriMesh& mesh,
                                             std::shared_ptr<const WolffSolution> wolff,
                                             const DictionaryOptions& options = {});

struct PreorderWitness {
  std::string id;      // dictionary entry that achieved the worst ratio
  std::size_t index = 0;
  double value = 0.0;  // <(lhs - rhs)(f), f> on the normalized trace
  double scale = 0.0;  // |<L_ref(f), f>|
};

struct PreorderVerdict {
  bool consistent = true;
  double worst_ratio = 0.0;  // min over the dictionary of value / scale
  PreorderWitness worst;     // meaningful whenever the dictionary is nonempty
};

/// Tests "lhs >= rhs" over a finite dictionary: violated iff some trace f
/// gives <(lhs - rhs)(f), f> < -margin * |<L_ref(f), f>|. A "consistent"
/// answer is dictionary-relative by construction; "violated" is sound.
PreorderVerdict preorder_test(const PairingExpr& lhs, const PairingExpr& rhs,
                              const std::vector<DictionaryEntry>& dictionary,
                              const DnOracle& reference, double margin = 1e-8);

/// Measurement dump: one CSV row (trace_id, pairing value, log_scale) per
/// dictionary entry, for offline replay.
void dump_measurements(const DnOracle& oracle, const std::vector<DictionaryEntry>& dictionary,
                       std::ostream& out);

}  // namespace pcond
