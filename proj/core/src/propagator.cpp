#include "aoheom/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "aoheom/errors.hpp"

namespace aoheom {

namespace {

constexpr Complex kI{0.0, 1.0};

RealSparseMatrix to_sparse(const Eigen::MatrixXd& m) {
    RealSparseMatrix s = m.sparseView(1.0, 1e-300);
    s.makeCompressed();
    return s;
}

// acc += S A + sign * A S for real CSR S and column-major A.
void add_product_pair(ComplexMatrix& acc, const RealSparseMatrix& S, const ComplexMatrix& A,
                      double sign) {
    const Eigen::Index n = A.rows();
    const int* outer = S.outerIndexPtr();
    const int* inner = S.innerIndexPtr();
    const double* val = S.valuePtr();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex* a = A.data() + j * n;
        Complex* o = acc.data() + j * n;
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex sum{};
            for (int q = outer[i]; q < outer[i + 1]; ++q) sum += val[q] * a[inner[q]];
            o[i] += sum;
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex* a = A.data() + k * n;
        for (int q = outer[k]; q < outer[k + 1]; ++q) {
            const double w = sign * val[q];
            Complex* o = acc.data() + static_cast<Eigen::Index>(inner[q]) * n;
            for (Eigen::Index i = 0; i < n; ++i) o[i] += w * a[i];
        }
    }
}

// Per-thread work buffers for one ADO evaluation.
struct RhsScratch {
    Eigen::Index dim = -1;
    ComplexMatrix total;  // sum of all superoperator terms before the -i factor
    ComplexMatrix comm;   // argument of V_a^x
    ComplexMatrix anti;   // argument of ([H,V_a])^o
    std::array<ComplexMatrix, 3> closure_comm;
    std::array<ComplexMatrix, 3> closure_anti;

    void resize(Eigen::Index n) {
        if (dim == n) return;
        dim = n;
        total.resize(n, n);
        comm.resize(n, n);
        anti.resize(n, n);
        for (auto& m : closure_comm) m.resize(n, n);
        for (auto& m : closure_anti) m.resize(n, n);
    }
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::size_t i = 0; i < std::min(n, chunk); ++i) fn(i);
    for (auto& t : pool) t.join();
}

void require_same_shape(const HierarchyState& a, const ModelContext& model) {
    if (!a.space || a.space->size() != model.space->size() || !(*a.space == *model.space)) {
        throw InvalidArgument("state and model use different hierarchy index spaces");
    }
    if (a.ados.size() != model.space->size()) {
        throw InvalidArgument("state does not hold one matrix per hierarchy index");
    }
    for (const auto& m : a.ados) {
        if (static_cast<std::size_t>(m.rows()) != model.dimension() ||
            static_cast<std::size_t>(m.cols()) != model.dimension()) {
            throw InvalidArgument("ADO dimension does not match the model basis");
        }
    }
}

}  // namespace

HierarchyState HierarchyState::zeros(std::shared_ptr<const HierarchyIndexSpace> space,
                                     std::size_t dimension) {
    HierarchyState s;
    const auto dim = static_cast<Eigen::Index>(dimension);
    s.ados.assign(space->size(), ComplexMatrix::Zero(dim, dim));
    s.space = std::move(space);
    return s;
}

ModelContext make_model(BasisSet basis, OperatorMatrix H, std::array<OperatorMatrix, 3> V,
                        const BathSpec& bath, std::array<int, 3> pade_K, int depth,
                        TruncationMode truncation) {
    bath.validate();
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    if (H.entries.rows() != dim || H.entries.cols() != dim) {
        throw InvalidArgument("H_S dimension does not match the basis");
    }
    for (const auto& v : V) {
        if (v.entries.rows() != dim || v.entries.cols() != dim) {
            throw InvalidArgument("coupling operator dimension does not match the basis");
        }
    }

    ModelContext m;
    m.basis = std::move(basis);
    m.H = std::move(H);
    m.V = std::move(V);
    m.bath = bath;
    m.space = std::make_shared<const HierarchyIndexSpace>(
        HierarchyIndexSpace::enumerate(pade_K, depth, truncation));
    for (Axis a : kAxes) {
        const int ai = static_cast<int>(a);
        m.pade[ai] = pade_decomposition(pade_K[ai]);
        m.theta[ai] = theta_coefficients(bath[a], bath.beta, m.pade[ai]);
        m.nu[ai] = bath_frequencies(bath[a], bath.beta, m.pade[ai]);
    }

    const Eigen::MatrixXd& h = m.H.entries;
    m.h_diagonal = (h - Eigen::MatrixXd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    m.energies = h.diagonal();
    m.H_sparse = to_sparse(h);
    for (Axis a : kAxes) {
        const int ai = static_cast<int>(a);
        const Eigen::MatrixXd& v = m.V[ai].entries;
        m.V_sparse[ai] = to_sparse(v);
        m.W_sparse[ai] = to_sparse(h * v - v * h);
    }

    const auto& space = *m.space;
    m.nu_flat = space.flatten(m.nu);
    m.fluct_coef.assign(space.n_modes(), 0.0);
    m.diss_coef.assign(space.n_modes(), 0.0);
    for (int j = 0; j < space.n_modes(); ++j) {
        const int ai = static_cast<int>(space.mode_axis(j));
        const int k = space.mode_k(j);
        const auto& th = m.theta[ai];
        if (k == 0) {
            m.fluct_coef[j] = th.c0_fluct;
            m.diss_coef[j] = th.c0_diss;
        } else {
            m.fluct_coef[j] = th.ck[k - 1];
        }
    }
    m.rates.resize(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) m.rates[p] = damping_rate(space[p], m.nu_flat);
    return m;
}

ModelContext make_model(const BasisSet& basis, const BathSpec& bath, std::array<int, 3> pade_K,
                        int depth, TruncationMode truncation) {
    std::array<OperatorMatrix, 3> V{
        position_operator_matrix(basis, Axis::x, RadialMode::linear),
        position_operator_matrix(basis, Axis::y, RadialMode::linear),
        position_operator_matrix(basis, Axis::z, RadialMode::linear)};
    return make_model(basis, hamiltonian_matrix(basis), std::move(V), bath, pade_K, depth,
                      truncation);
}

void PropagatorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
    if (n_steps == 0) throw InvalidArgument("n_steps must be > 0");
    if (!(equilibration_tolerance > 0.0)) {
        throw InvalidArgument("equilibration tolerance must be > 0");
    }
    if (workers == 0) throw InvalidArgument("worker count must be >= 1");
}

void heom_rhs(const HierarchyState& in, const ModelContext& model, HierarchyState& out,
              const RhsOptions& options) {
    require_same_shape(in, model);
    if (out.ados.size() != in.ados.size()) out = HierarchyState::zeros(in.space, in.dimension());
    out.space = in.space;
    out.time = in.time;

    const auto& space = *model.space;
    const auto dim = static_cast<Eigen::Index>(model.dimension());
    const bool closure = options.terminator == TerminatorMode::eq8;

    ComplexMatrix drift;
    if (model.h_diagonal) {
        drift.resize(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            for (Eigen::Index i = 0; i < dim; ++i)
                drift(i, j) = -kI * (model.energies(i) - model.energies(j));
    }

    parallel_for(space.size(), options.workers, [&](std::size_t p) {
        thread_local RhsScratch scratch;
        scratch.resize(dim);
        const auto& idx = space[p];
        const ComplexMatrix& rho = in.ados[p];
        ComplexMatrix& d = out.ados[p];
        ComplexMatrix& total = scratch.total;
        total.setZero();

        // -(i H^x + sum n nu) rho
        if (model.h_diagonal) {
            d.array() = (drift.array() - model.rates[p]) * rho.array();
        } else {
            d = -model.rates[p] * rho;
            add_product_pair(total, model.H_sparse, rho, -1.0);
        }

        // -i V_a^x (sum_k n_k c_k rho_{n - e_k} + sum_k rho_{n + e_k})
        //   - i n_0 c_diss ([H,V_a])^o rho_{n - e_0}
        int j = 0;
        for (Axis a : kAxes) {
            const int ai = static_cast<int>(a);
            const int K = space.per_axis_K()[ai];
            bool any_comm = false;
            bool any_anti = false;
            std::array<bool, 3> closure_comm_used{};
            std::array<bool, 3> closure_anti_used{};
            for (int k = 0; k <= K; ++k, ++j) {
                const int c = idx.counts[j];
                if (c > 0) {
                    const ComplexMatrix& lower = in.ados[*space.neighbor(p, j, -1)];
                    if (model.fluct_coef[j] != 0.0) {
                        if (!any_comm) scratch.comm.setZero();
                        any_comm = true;
                        scratch.comm += (c * model.fluct_coef[j]) * lower;
                    }
                    if (model.diss_coef[j] != 0.0) {
                        if (!any_anti) scratch.anti.setZero();
                        any_anti = true;
                        scratch.anti += (c * model.diss_coef[j]) * lower;
                    }
                }
            }
            j -= K + 1;
            for (int k = 0; k <= K; ++k, ++j) {
                if (auto up = space.neighbor(p, j, +1)) {
                    if (!any_comm) scratch.comm.setZero();
                    any_comm = true;
                    scratch.comm += in.ados[*up];
                    continue;
                }
                if (!closure) continue;
                // rho_{n+e_j} ~ -i / (sum m nu) * sum_i m_i Theta_i rho_{m - e_i}, grouped by
                // the axis of Theta_i
                const Complex scale = -kI / (model.rates[p] + model.nu_flat[j]);
                for (const auto& link : space.terminator_links(p, j)) {
                    const int bi = static_cast<int>(space.mode_axis(link.mode));
                    const ComplexMatrix& src = in.ados[link.position];
                    const double f = model.fluct_coef[link.mode];
                    const double g = model.diss_coef[link.mode];
                    if (f != 0.0) {
                        if (!closure_comm_used[bi]) scratch.closure_comm[bi].setZero();
                        closure_comm_used[bi] = true;
                        scratch.closure_comm[bi] += (scale * (link.multiplicity * f)) * src;
                    }
                    if (g != 0.0) {
                        if (!closure_anti_used[bi]) scratch.closure_anti[bi].setZero();
                        closure_anti_used[bi] = true;
                        scratch.closure_anti[bi] += (scale * (link.multiplicity * g)) * src;
                    }
                }
            }
            for (int bi = 0; bi < 3; ++bi) {
                if (!closure_comm_used[bi] && !closure_anti_used[bi]) continue;
                if (!any_comm) scratch.comm.setZero();
                any_comm = true;
                if (closure_comm_used[bi]) {
                    add_product_pair(scratch.comm, model.V_sparse[bi], scratch.closure_comm[bi], -1.0);
                }
                if (closure_anti_used[bi]) {
                    add_product_pair(scratch.comm, model.W_sparse[bi], scratch.closure_anti[bi], 1.0);
                }
            }
            if (any_comm) add_product_pair(total, model.V_sparse[ai], scratch.comm, -1.0);
            if (any_anti) add_product_pair(total, model.W_sparse[ai], scratch.anti, 1.0);
        }
        d += -kI * total;
    });
}

HierarchyState heom_rhs(const HierarchyState& in, const ModelContext& model,
                        const RhsOptions& options) {
    HierarchyState out = HierarchyState::zeros(in.space, in.dimension());
    heom_rhs(in, model, out, options);
    return out;
}

double max_norm(const HierarchyState& state) {
    double r = 0.0;
    for (const auto& m : state.ados) {
        if (m.size() > 0) r = std::max(r, m.cwiseAbs().maxCoeff());
    }
    return r;
}

Rk4Integrator::Rk4Integrator(const ModelContext& model, RhsOptions options)
    : model_(model), options_(options) {
    const auto zero = HierarchyState::zeros(model.space, model.dimension());
    k1_ = k2_ = k3_ = k4_ = tmp_ = zero;
}

void Rk4Integrator::step(HierarchyState& state, double dt, std::size_t step) {
    heom_rhs(state, model_, k1_, options_);
    last_residual_ = max_norm(k1_);
    finish_step(state, dt, step);
}

bool Rk4Integrator::step_unless_converged(HierarchyState& state, double dt, double tolerance,
                                          std::size_t step) {
    heom_rhs(state, model_, k1_, options_);
    last_residual_ = max_norm(k1_);
    if (last_residual_ < tolerance) return false;
    finish_step(state, dt, step);
    return true;
}

void Rk4Integrator::finish_step(HierarchyState& state, double dt, std::size_t step) {
    const std::size_t n = state.ados.size();

    for (std::size_t p = 0; p < n; ++p) tmp_.ados[p] = state.ados[p] + (0.5 * dt) * k1_.ados[p];
    tmp_.time = state.time + 0.5 * dt;
    heom_rhs(tmp_, model_, k2_, options_);
    for (std::size_t p = 0; p < n; ++p) tmp_.ados[p] = state.ados[p] + (0.5 * dt) * k2_.ados[p];
    heom_rhs(tmp_, model_, k3_, options_);
    for (std::size_t p = 0; p < n; ++p) tmp_.ados[p] = state.ados[p] + dt * k3_.ados[p];
    tmp_.time = state.time + dt;
    heom_rhs(tmp_, model_, k4_, options_);

    const double w1 = dt / 6.0;
    const double w2 = dt / 3.0;
    for (std::size_t p = 0; p < n; ++p) {
        state.ados[p] += w1 * k1_.ados[p] + w2 * k2_.ados[p] + w2 * k3_.ados[p] + w1 * k4_.ados[p];
        if (!state.ados[p].allFinite()) {
            std::ostringstream msg;
            msg << "propagation diverged at step " << step << " in ADO " << p;
            throw DivergenceError(msg.str(), step, p);
        }
    }
    state.time += dt;
}

HierarchyState rk4_step(const HierarchyState& state, const ModelContext& model, double dt,
                        const RhsOptions& options) {
    require_same_shape(state, model);
    Rk4Integrator integrator(model, options);
    HierarchyState next = state;
    integrator.step(next, dt);
    return next;
}

HierarchyState boltzmann_initial(const BasisSet& basis, double beta,
                                 std::shared_ptr<const HierarchyIndexSpace> space) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be >= 0");
    auto state = HierarchyState::zeros(std::move(space), basis.dimension());
    double e_min = 0.0;
    for (const auto& q : basis.states()) e_min = std::min(e_min, eigenenergy(q.n));
    double z = 0.0;
    std::vector<double> w(basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        w[i] = std::exp(-beta * (eigenenergy(basis[i].n) - e_min));
        z += w[i];
    }
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        state.reduced()(ii, ii) = w[i] / z;
    }
    return state;
}

double rk4_stability_estimate(const ModelContext& model, double dt) {
    // power iteration on the generator; the norm ratio tends to the spectral radius
    auto norm = [](const HierarchyState& s) {
        double sum = 0.0;
        for (const auto& m : s.ados) sum += m.squaredNorm();
        return std::sqrt(sum);
    };
    auto x = HierarchyState::zeros(model.space, model.dimension());
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& m : x.ados)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = {u(rng), u(rng)};
    HierarchyState y;
    double radius = 0.0;
    for (int it = 0; it < 60; ++it) {
        const double nx = norm(x);
        if (nx == 0.0) break;
        heom_rhs(x, model, y, {});
        const double ny = norm(y);
        radius = ny / nx;
        if (ny == 0.0) break;
        for (std::size_t p = 0; p < y.ados.size(); ++p) x.ados[p] = y.ados[p] / ny;
    }
    return dt * radius;
}

void warn_if_unstable(const ModelContext& model, double dt) {
    const double e = rk4_stability_estimate(model, dt);
    if (e > 2.8) {
        std::cerr << "warning: dt = " << dt << " may be outside the RK4 stability region (estimate " << e
                  << " > 2.8)\n";
    }
}

EquilibrationResult equilibrate(const HierarchyState& initial, const ModelContext& model,
                                const PropagatorConfig& config) {
    config.validate();
    require_same_shape(initial, model);
    warn_if_unstable(model, config.dt);
    EquilibrationResult result{initial, 0.0, 0};
    Rk4Integrator integrator(model, config.rhs_options());

    // The first RK4 stage is the residual of the state about to be stepped.
    while (integrator.step_unless_converged(result.state, config.dt,
                                            config.equilibration_tolerance, result.steps)) {
        if (++result.steps < config.max_equilibration_steps) continue;
        auto& derivative = integrator.scratch();
        heom_rhs(result.state, model, derivative, config.rhs_options());
        result.residual = max_norm(derivative);
        if (result.residual < config.equilibration_tolerance) break;
        std::ostringstream msg;
        msg << "equilibration did not converge in " << result.steps << " steps; residual "
            << result.residual << " >= tolerance " << config.equilibration_tolerance;
        throw ConvergenceError(msg.str(), result.residual);
    }
    if (result.steps < config.max_equilibration_steps) result.residual = integrator.last_residual();
    result.state.time = 0.0;
    return result;
}

Diagnostics diagnostics(const HierarchyState& state) {
    Diagnostics d;
    if (state.ados.empty()) return d;
    const auto& rho = state.reduced();
    d.trace = rho.trace();
    d.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    d.max_hermiticity_defect = d.hermiticity_defect;
    for (const auto& m : state.ados) {
        d.max_hermiticity_defect =
            std::max(d.max_hermiticity_defect, (m - m.adjoint()).cwiseAbs().maxCoeff());
    }
    d.populations.resize(static_cast<std::size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) d.populations[i] = rho(i, i).real();
    return d;
}

}  // namespace aoheom
