#pragma once

// Hierarchy right-hand side, RK4 time stepping and equilibration.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "aoheom/basis.hpp"
#include "aoheom/bath.hpp"
#include "aoheom/hierarchy.hpp"

namespace aoheom {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct HierarchyState {
    std::shared_ptr<const HierarchyIndexSpace> space;
    std::vector<ComplexMatrix> ados;  // one per index, in space order
    double time = 0.0;

    static HierarchyState zeros(std::shared_ptr<const HierarchyIndexSpace> space,
                                std::size_t dimension);

    std::size_t dimension() const noexcept {
        return ados.empty() ? 0 : static_cast<std::size_t>(ados.front().rows());
    }
    const ComplexMatrix& reduced() const { return ados.front(); }
    ComplexMatrix& reduced() { return ados.front(); }
};

enum class TerminatorMode {
    eq8,  // missing upward neighbours replaced by their quasi-static closure
    zero  // missing upward neighbours contribute nothing
};

struct ModelContext {
    BasisSet basis;
    OperatorMatrix H;
    std::array<OperatorMatrix, 3> V;
    BathSpec bath;
    std::array<PadeScheme, 3> pade;
    std::array<ThetaCoefficients, 3> theta;
    std::array<std::vector<double>, 3> nu;  // nu_0 = gamma, nu_k = xi_k / beta
    std::shared_ptr<const HierarchyIndexSpace> space;

    // Derived data used by the right-hand side.
    bool h_diagonal = true;
    Eigen::VectorXd energies;
    std::array<RealSparseMatrix, 3> V_sparse;
    std::array<RealSparseMatrix, 3> W_sparse;  // [H, V_a]
    RealSparseMatrix H_sparse;
    std::vector<double> nu_flat;
    std::vector<double> fluct_coef;  // per mode: coefficient of V^x in Theta
    std::vector<double> diss_coef;   // per mode: coefficient of ([H,V])^o in Theta
    std::vector<double> rates;       // per ADO: sum_j n_j nu_j

    std::size_t dimension() const noexcept { return basis.dimension(); }
};

// Model with explicit operator matrices (used for reduced test systems).
ModelContext make_model(BasisSet basis, OperatorMatrix H, std::array<OperatorMatrix, 3> V,
                        const BathSpec& bath, std::array<int, 3> pade_K, int depth,
                        TruncationMode truncation = TruncationMode::global);

// Hydrogenic model: H_S and V_a = r * direction cosine on the given basis.
ModelContext make_model(const BasisSet& basis, const BathSpec& bath, std::array<int, 3> pade_K,
                        int depth, TruncationMode truncation = TruncationMode::global);

struct RhsOptions {
    TerminatorMode terminator = TerminatorMode::eq8;
    unsigned workers = 1;
};

struct PropagatorConfig {
    double dt = 0.1;
    std::size_t n_steps = 3000;
    TerminatorMode terminator = TerminatorMode::eq8;
    double equilibration_tolerance = 1e-9;
    std::size_t max_equilibration_steps = 2000000;
    unsigned workers = 1;

    RhsOptions rhs_options() const { return {terminator, workers}; }
    void validate() const;
};

// d/dt of every ADO. `out` must have the same shape as `in`.
void heom_rhs(const HierarchyState& in, const ModelContext& model, HierarchyState& out,
              const RhsOptions& options = {});
HierarchyState heom_rhs(const HierarchyState& in, const ModelContext& model,
                        const RhsOptions& options = {});

// Max-entry norm over all ADOs.
double max_norm(const HierarchyState& state);

// Reusable RK4 stepper; holds the stage buffers.
class Rk4Integrator {
public:
    Rk4Integrator(const ModelContext& model, RhsOptions options);

    // Advances `state` by dt. `step` is only used in the divergence report.
    void step(HierarchyState& state, double dt, std::size_t step = 0);

    // Evaluates the first stage only; steps when its max norm is >= tolerance.
    // Returns whether a step was taken.
    bool step_unless_converged(HierarchyState& state, double dt, double tolerance,
                               std::size_t step = 0);

    HierarchyState& scratch() noexcept { return tmp_; }

    // max_norm of the first stage of the last step, i.e. of heom_rhs(state before the step).
    double last_residual() const noexcept { return last_residual_; }

private:
    void finish_step(HierarchyState& state, double dt, std::size_t step);

    const ModelContext& model_;
    RhsOptions options_;
    HierarchyState k1_, k2_, k3_, k4_, tmp_;
    double last_residual_ = 0.0;
};

HierarchyState rk4_step(const HierarchyState& state, const ModelContext& model, double dt,
                        const RhsOptions& options = {});

// Zeroth ADO = exp(-beta H_S) / Z on the basis, all others zero. beta = 0 gives
// uniform populations.
HierarchyState boltzmann_initial(const BasisSet& basis, double beta,
                                 std::shared_ptr<const HierarchyIndexSpace> space);

// dt times a power-iteration estimate of the generator's spectral radius.
// RK4 is stable for values below about 2.8; equilibrate and compute_response
// warn above it.
double rk4_stability_estimate(const ModelContext& model, double dt);
void warn_if_unstable(const ModelContext& model, double dt);

struct EquilibrationResult {
    HierarchyState state;
    double residual = 0.0;
    std::size_t steps = 0;
};

// Time-marches until max_norm(heom_rhs) < tolerance. Throws ConvergenceError
// (carrying the last residual) after max_equilibration_steps.
EquilibrationResult equilibrate(const HierarchyState& initial, const ModelContext& model,
                                const PropagatorConfig& config);

struct Diagnostics {
    Complex trace;
    double hermiticity_defect = 0.0;      // zeroth ADO
    double max_hermiticity_defect = 0.0;  // over all ADOs
    std::vector<double> populations;
};

Diagnostics diagnostics(const HierarchyState& state);

}  // namespace aoheom
