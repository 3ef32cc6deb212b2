#pragma once

// Light-cone geometry from commutator norms: (shift, time) scans, threshold
// crossing velocities and comparison with the decay bounds.

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrcone/dynamics.hpp"
#include "lrcone/harmonic.hpp"
#include "lrcone/model.hpp"

namespace lrcone {

enum class ScanSource { HarmonicExact, FockNumeric };

std::string to_string(ScanSource s);
ScanSource scan_source_from_string(const std::string& s);

struct ConePoint {
  int h = 0;
  double t = 0.0;
  double norm = 0.0;
};

struct ConeScan {
  std::string model_id;
  ModelSpec model;
  std::string a_desc, b_desc;
  ScanSource source = ScanSource::HarmonicExact;
  std::vector<ConePoint> points;

  /// Distinct shifts in order of first appearance.
  std::vector<int> shifts() const;
};

/// Short identifier such as "cyclic-n16-a5-b2".
std::string model_id(const ModelSpec& spec);

/// ||[alpha^t(W(a)), tau_h(W(b))]|| from the exact symplectic formula. a and b
/// are array-indexed phase points of the whole lattice; tau_h moves b by +h
/// sites (wrapping on the ring). On open chains of 16 or more sites, points
/// whose shifted b touches the outer quarter of the chain are dropped.
/// Throws InvalidArgument when a shift leaves the lattice.
ConeScan cone_scan_harmonic(const ModelSpec& spec, const PhasePoint& a, const PhasePoint& b,
                            const std::vector<int>& h_grid, const std::vector<double>& t_grid);

/// Dense Fock scan: commutator_norm(heisenberg_evolve(A, t), shift_observable(B, h)).
ConeScan cone_scan_fock(const HamiltonianBundle& bundle, const ObservableOp& a, const ObservableOp& b,
                        const std::vector<int>& h_grid, const std::vector<double>& t_grid,
                        const BulkBlock* block = nullptr);

/// State-based Fock scan on any propagator: ||[alpha^t(A), tau_h(B)] P_b|| with
/// P_b the Fock states of total occupation <= block_quanta. t_grid must be
/// nondecreasing and nonnegative; states are evolved incrementally.
ConeScan cone_scan_fock(const Propagator& prop, const LocalObservable& a, const LocalObservable& b,
                        const std::vector<int>& h_grid, const std::vector<double>& t_grid,
                        int block_quanta = 0);

struct Crossing {
  int h = 0;
  double t = 0.0;
};

struct VelocityReport {
  bool defined = false;
  double v_empirical = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  std::vector<Crossing> crossings;
  double gamma_fit = std::numeric_limits<double>::quiet_NaN();
  double M_fit = std::numeric_limits<double>::quiet_NaN();
  double C_fit = std::numeric_limits<double>::quiet_NaN();
  int outside_points = 0;
  double v_bound_quadratic = std::numeric_limits<double>::quiet_NaN();
  double v_bound_general = std::numeric_limits<double>::quiet_NaN();
};

/// First time each shift h != 0 exceeds the threshold, interpolated linearly.
std::vector<Crossing> crossing_times(const ConeScan& scan, double threshold);

/// Least-squares slope of |h| against crossing time (needs three crossings),
/// log-linear fit log norm = log C + M t - gamma |h| over points with
/// |h| > v t + 1, and the theoretical bounds of the scan's model.
VelocityReport fit_velocity(const ConeScan& scan, double threshold);

struct ConeBoundCheck {
  double gamma = 0.0;
  double C = 0.0;
  double M = 0.0;
  long checked = 0;
  long violations = 0;
  double max_ratio = 0.0;
};

/// norm(h, t) <= prefactor * C e^{M|t|} e^{-gamma d(h)} + abs_floor, d the
/// cyclic distance on a ring of ring_size sites (|h| when ring_size == 0).
/// abs_floor absorbs the rounding floor of the computed norms; points below
/// it are counted but excluded from max_ratio.
ConeBoundCheck check_cone_bound(const ConeScan& scan, double gamma, double C, double M, int ring_size,
                                double prefactor = 1.0, double abs_floor = 0.0);

/// Norms along (h_k, t_k) = (ceil(v k dt), k dt), k = 0..steps.
std::vector<ConePoint> ray_scan_harmonic(const ModelSpec& spec, const PhasePoint& a, const PhasePoint& b,
                                         double v, double dt, int steps);

/// Index from which the sequence is strictly decreasing to the end, or -1.
int strictly_decreasing_from(const std::vector<double>& values);

/// Columns h, t, norm.
void write_csv(std::ostream& os, const ConeScan& scan);

void to_json(nlohmann::json& j, const ConeScan& s);
void from_json(const nlohmann::json& j, ConeScan& s);
void to_json(nlohmann::json& j, const VelocityReport& r);
void from_json(const nlohmann::json& j, VelocityReport& r);

}  // namespace lrcone
