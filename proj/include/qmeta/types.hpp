#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace qmeta {

using cplx = std::complex<double>;

// All rates and frequencies are dimensionless in units of the reference decay
// rate gamma0; all lengths are in units of the probe wavelength lambda_b, so
// the probe wavenumber is fixed.
inline constexpr double k0 = 2.0 * std::numbers::pi;

// Spontaneous decay rates of the four-level atom {|a>, |b>, |c>, |d>} and the
// coherence linewidths derived from them.
struct LevelScheme {
    double gamma_a = 0.86;
    double gamma_b = 0.62;
    double gamma_d = 1.092;

    double gamma_ab() const { return 0.5 * gamma_b; }
    double gamma_ad() const { return 0.5 * gamma_b; }
    double gamma_ca() const { return 0.5 * (gamma_a + gamma_b + gamma_d); }
    double gamma_cb() const { return 0.5 * (gamma_a + gamma_d); }
    double gamma_cd() const { return 0.5 * (gamma_a + gamma_d); }
    double gamma_db() const { return 0.0; }
};

// Coherent drive fields plus the incoherent repump rate on |b> -> |a>.
struct DriveConfig {
    double omega_a = 1.3;
    double omega_d = 0.024;
    double delta_a = 0.0;
    double delta_d = -1.40073;
    double pump_rate = 0.0;
};

// Weak probe on the |a> <-> |b> transition. omega_b is the *starting* probe
// strength for the linear-response extraction; the solver halves it until the
// response is linear.
struct ProbeConfig {
    double delta_b = -1.40083;
    double omega_b = 1e-4;
};

struct CouplingStrength {
    double zeta = 15.0;
};

// Complex off-diagonal relaxation rates: real part = derived linewidth,
// imaginary part = detuning combination.
struct ComplexRelaxationSet {
    cplx Gamma_ab;
    cplx Gamma_ca;
    cplx Gamma_cd;
    cplx Gamma_cb;
    cplx Gamma_ad;
    cplx Gamma_db;
};

struct FigureOfMerit {
    double eta = 0.0;       // |Re eps| / Im eps, +infinity at lossless points
    bool gain_flag = false; // Im eps < -1e-15: pump-induced gain (not an error)
};

struct OperatingPoint {
    double delta_b_star = 0.0;
    double pump_rate_star = 0.0;
    cplx chi_star;     // oracle susceptibility at the operating point
    cplx epsilon_star; // local-field-corrected permittivity there
};

// One lattice period: period in lambda_b units, Gaussian 1/e half-width in
// units of the period, slab discretization, and the finite-stack size used by
// the decay calculation.
struct LatticeGeometry {
    double period_a = 0.25;
    double gauss_w = 0.1;
    int slabs_per_period = 64;
    int num_periods = 8;
};

// Homogenized slab. For plain isotropic slabs inv_ezz == 1/eps_par; the
// moment-homogenized builder stores the tangential mean <eps> and the
// principal-value mean <1/eps> separately.
struct Slab {
    cplx eps_par = 1.0;
    cplx inv_ezz = 1.0;
    double thickness = 0.0;
};

struct PermittivityProfile {
    std::vector<Slab> slabs;
    double period = 0.0;
};

struct BlochPoint {
    double ky = 0.0; // real transverse wavevector
    cplx kz;         // complex Bloch wavevector, Im >= 0, Re in [0, pi/a]
    bool propagating = false;
};

enum class Topology { Open, Closed, Indeterminate };

struct IsofrequencyContour {
    std::vector<BlochPoint> points;
    double period = 0.0;
    double evanescence_threshold = 0.0;
    Topology topology = Topology::Indeterminate;
    double k_max_propagating = 0.0;
    // Bisection-refined propagating -> evanescent transition along ky.
    bool has_transition = false;
    double transition_ky = 0.0;
    double transition_re_kz = 0.0;
};

// Finite-stack geometry seen by the emitter: the dipole sits at a period
// boundary in a vacuum gap of half-width `gap` on each side; `core` is the
// homogenized non-vacuum section of one period.
struct EmitterStack {
    double gap = 0.0;
    std::vector<Slab> core;
};

// Emitter placement: z-offset within the host period (units of the period)
// and the number of lattice periods on each side.
struct DipoleContext {
    double position = 0.0;
    int stack_left = 8;
    int stack_right = 8;
};

struct DecayRateResult {
    double gamma_normalized = 1.0;
    double propagating_part = 0.0; // contribution from s < 1 (radiative waves)
    double evanescent_part = 0.0;  // contribution from s > 1 (near field)
    double quad_error = 0.0;       // summed quadrature error estimates
};

struct BranchingRow {
    double omega_a = 0.0;
    double xi = 0.0;     // gamma_3 / gamma_2 with gamma_2 the bare vacuum rate
    double gamma3 = 0.0; // gamma_3 / gamma0
    double quad_error = 0.0;
    std::string error; // non-empty when this row failed; scan continues
};

} // namespace qmeta
