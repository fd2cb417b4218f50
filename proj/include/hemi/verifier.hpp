#pragma once

// End-to-end check of the inequality sum_{i<N} 1/mu_i(Omega) >= (N-1)/mu_1(D_gamma)
// and of the intermediate estimates used to prove it.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hemi/cap_spectrum.hpp"
#include "hemi/domain.hpp"
#include "hemi/fem.hpp"
#include "hemi/mesh.hpp"
#include "hemi/region_integrals.hpp"
#include "hemi/stereographic.hpp"

namespace hemi {

/// Rotation of S^2 taking the point `pole()` to the North Pole along a great circle.
/// dim 3 domains only use the identity (their symmetry fixes the pole).
struct Rotation {
    int dim = 2;
    double colatitude = 0.0;
    double longitude = 0.0;

    static Rotation identity(int dim = 2) { return Rotation{dim, 0.0, 0.0}; }
    static Rotation to_pole(const stereo::Vec3& q, int dim = 2);
    stereo::Vec3 pole() const;
    integrals::Mat3 matrix() const;
    stereo::Vec3 apply(const stereo::Vec3& x) const;
};

struct BalancingResult {
    Rotation rotation;
    std::vector<double> integrals;  ///< int_Omega Phi_i dw in the rotated frame
    double residual = 0.0;          ///< Euclidean norm of `integrals`
    double scale = 0.0;             ///< G(gamma) |Omega|
    double target = 0.0;            ///< 1e-8 scale
    bool success = false;
    int newton_steps = 0;
    bool used_grid_search = false;
};

/// dim 2: damped Newton on the pole position (finite-difference Jacobian),
/// with a 32 x 32 grid search fallback.
BalancingResult find_balancing_rotation(const DomainSpec& spec, const cap::ExtendedProfile& G);

/// Integrals of Phi_i over a dim 3 revolution domain (pole on the symmetry axis).
BalancingResult revolution_balance(const DomainSpec& spec, const cap::ExtendedProfile& G);

struct TestBound {
    double lhs = 0.0;  ///< int_Omega Phi_i^2
    double rhs = 0.0;  ///< test-function bound with mu_i(Omega)
};

struct ProofStepReport {
    BalancingResult balance;
    double omega_G2_over_sin2 = 0.0;      ///< int_Omega G^2 / sin^2
    double cap_g2_over_sin2 = 0.0;        ///< int_{D_gamma} g^2 / sin^2
    double sin_weighted_residual = 0.0;   ///< first minus second; expected <= 0
    double omega_G2 = 0.0;                ///< int_Omega G^2
    double cap_g2 = 0.0;                  ///< int_{D_gamma} g^2
    double mass_residual = 0.0;           ///< expected >= 0
    double cap_gprime2 = 0.0;             ///< int_{D_gamma} g'^2
    double energy_lhs = 0.0;
    double energy_rhs = 0.0;
    double rearrangement_residual = 0.0;  ///< max over directions of 1/mu_N - sum_i w_i / mu_i; expected <= 0
    std::vector<TestBound> test_bounds;
    /// |int Phi_i u_j| / (|Phi_i| |u_j|) for i = 1..N, j = 1..N-1 (dim 2 with eigenvectors only).
    std::vector<std::vector<double>> orthogonality;
    bool holds_sin_weighted = false;
    bool holds_mass = false;
    bool holds_rearrangement = false;
};

/// Eigenvectors on a mesh, used for the orthogonality residuals.
struct EigenfunctionData {
    const TriangleMesh* mesh = nullptr;
    const fem::AssembledSystem* system = nullptr;
    const eigen::EigenPairs* pairs = nullptr;
};

/// `mu` holds mu_0 = 0, mu_1, ..., at least up to mu_N.
ProofStepReport check_proof_steps(const DomainSpec& spec, const cap::ExtendedProfile& G, const std::vector<double>& mu,
                                  const EigenfunctionData& eigenfunctions = {});

struct VerifyOptions {
    double h = 0.04;
    int refinements = 1;
    int count = 0;              ///< eigenvalues mu_0..mu_{count-1}; 0 means N + 2
    bool proof_steps = false;
    bool extrapolate = true;    ///< Richardson (4 fine - coarse) / 3 when refinements >= 1
    double tolerance_constant = 1.0;  ///< tolerance = max(1e-3, C h^2)
    fem::SpectrumOptions spectrum;
    MeshOptions mesh;
};

struct InequalityReport {
    int dim = 2;
    DomainKind kind = DomainKind::cap;
    std::vector<double> eigenvalues;         ///< mu_0, mu_1, ... (extrapolated when enabled)
    std::vector<double> fine_eigenvalues;    ///< finest mesh values
    double domain_volume = 0.0;              ///< exact domain
    double mesh_volume = 0.0;
    double equivalent_gamma = 0.0;
    double mu1_cap = 0.0;
    bool cap_attained_by_l1 = true;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double harmonic_lhs = 0.0;               ///< lhs / (N-1)
    double harmonic_rhs = 0.0;               ///< 1 / mu1_cap
    double tolerance = 0.0;
    bool passed = false;
    double mesh_h = 0.0;
    int refinements = 0;
    std::size_t vertices = 0;
    std::optional<ProofStepReport> proof;
};

InequalityReport verify_domain(const DomainSpec& spec, const VerifyOptions& options = {});

/// Merged eigenvalues of a dim 3 revolution domain: modes m = 0, 1, 2 with
/// multiplicity 1, 2, 2. Also returns the dim 2 spectrum for dim 2 meshes.
std::vector<double> domain_spectrum(const DomainSpec& spec, const TriangleMesh& mesh, int count,
                                    const fem::SpectrumOptions& options = {});

struct SweepOptions {
    std::string parameter = "gamma";
    double from = 0.0;
    double to = 1.0;
    int steps = 10;                  ///< grid values from + (to - from) k / steps, k = 1..steps
    bool cap_only = false;           ///< only mu_1(D_gamma) of the swept gamma
    unsigned threads = 0;            ///< 0: hardware concurrency
    VerifyOptions verify;
};

struct SweepRow {
    int index = 0;
    double value = 0.0;
    int status = 0;                  ///< 0 ok, 1 margin below tolerance, 2 input error, 3 solver failure
    std::string error;
    std::optional<InequalityReport> report;
    std::optional<cap::Mu1Result> cap;
};

std::vector<double> sweep_grid(const SweepOptions& options);
std::vector<SweepRow> sweep(const DomainSpec& family, const SweepOptions& options);

}  // namespace hemi
