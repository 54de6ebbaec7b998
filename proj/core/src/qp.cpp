#include "ocsvm/qp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ocsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_clamped(const QpProblem& prob) {
    for (std::size_t i = 0; i < prob.size(); ++i)
        if (prob.lower[i] != prob.upper[i]) return false;
    return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// g = Q alpha + p, computed fresh.
std::vector<double> full_gradient(const QpProblem& prob, const std::vector<double>& alpha) {
    const std::size_t n = prob.size();
    std::vector<double> g(prob.p.begin(), prob.p.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double a = alpha[j];
        if (a == 0.0) continue;
        const auto row = prob.q.row(j);
        for (std::size_t i = 0; i < n; ++i) g[i] += a * row[i];
    }
    return g;
}

double objective_from_gradient(const QpProblem& prob, const std::vector<double>& alpha,
                               const std::vector<double>& g) {
    // alpha' Q alpha = alpha' (g - p), so the objective is
    // 1/2 alpha' g + 1/2 alpha' p.
    return 0.5 * (dot(alpha, g) + dot(alpha, prob.p));
}

// Minimizes g' z over the box (optionally intersected with the equality
// constraint) and returns argmin through `z`. Used for the linearized
// optimality bound and as a direct LP solver when Q = 0.
double linear_minimize(const QpProblem& prob, const std::vector<double>& g,
                       std::vector<double>& z) {
    const std::size_t n = prob.size();
    z.resize(n);
    if (!prob.eq) {
        for (std::size_t i = 0; i < n; ++i) z[i] = g[i] > 0.0 ? prob.lower[i] : prob.upper[i];
        return dot(g, z);
    }
    const auto& c = prob.eq->coeffs;
    // Variables outside the constraint minimize independently.
    double fixed_sum = 0.0; // contribution of c_i = 0 vars to the objective only
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
        if (c[i] == 0.0) {
            z[i] = g[i] > 0.0 ? prob.lower[i] : prob.upper[i];
            fixed_sum += g[i] * z[i];
        } else {
            active.push_back(i);
        }
    }
    // Walk the multiplier breakpoints -g_i/c_i in increasing order; the
    // constrained sum h = sum c_i z_i is non-increasing along the walk.
    double h = 0.0;
    for (std::size_t i : active) z[i] = c[i] > 0.0 ? prob.upper[i] : prob.lower[i]; // mu -> -inf
    for (std::size_t i : active) h += c[i] * z[i];
    const double rhs = prob.eq->rhs;
    std::sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
        const double ba = -g[a] / c[a];
        const double bb = -g[b] / c[b];
        if (ba != bb) return ba < bb;
        return a < b;
    });
    if (h < rhs - 1e-9 * (1.0 + std::abs(rhs)))
        throw SolverError("linear subproblem infeasible: max attainable " + std::to_string(h) +
                          " < rhs " + std::to_string(rhs));
    for (std::size_t i : active) {
        if (h <= rhs) break;
        const double width = prob.upper[i] - prob.lower[i];
        const double drop = std::abs(c[i]) * width;
        if (h - drop >= rhs) {
            // flip entirely
            z[i] = c[i] > 0.0 ? prob.lower[i] : prob.upper[i];
            h -= drop;
        } else {
            // fractional: place z_i so that h becomes exactly rhs
            const double excess = h - rhs;
            z[i] -= excess / c[i];
            h = rhs;
        }
    }
    if (h > rhs + 1e-9 * (1.0 + std::abs(rhs)))
        throw SolverError("linear subproblem infeasible: min attainable " + std::to_string(h) +
                          " > rhs " + std::to_string(rhs));
    double val = fixed_sum;
    for (std::size_t i : active) val += g[i] * z[i];
    return val;
}

double gap_bound(const QpProblem& prob, const std::vector<double>& alpha,
                 const std::vector<double>& g) {
    std::vector<double> z;
    const double zmin = linear_minimize(prob, g, z);
    const double bound = dot(g, alpha) - zmin;
    return bound > 0.0 ? bound : 0.0;
}

struct KktState {
    double violation = 0.0;   // max over single and pair criteria
    std::ptrdiff_t single = -1;
    std::ptrdiff_t up = -1;   // pair candidates when an equality is present
    std::ptrdiff_t dn = -1;
    double v_up = -kInf;
    double v_dn = kInf;
    bool pair_selected = false;
};

// Maximal violating variable / pair, ties broken by lowest index.
KktState evaluate_kkt(const QpProblem& prob, const std::vector<double>& alpha,
                      const std::vector<double>& g) {
    const std::size_t n = prob.size();
    KktState st;
    double single_viol = 0.0;
    const std::vector<double>* c = prob.eq ? &prob.eq->coeffs : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
        const double ci = c ? (*c)[i] : 0.0;
        if (ci == 0.0) {
            double viol = 0.0;
            if (alpha[i] < prob.upper[i] && g[i] < 0.0) viol = -g[i];
            if (alpha[i] > prob.lower[i] && g[i] > 0.0) viol = std::max(viol, g[i]);
            if (viol > single_viol) {
                single_viol = viol;
                st.single = static_cast<std::ptrdiff_t>(i);
            }
        } else {
            const double v = -g[i] / ci;
            const bool can_up = ci > 0.0 ? alpha[i] < prob.upper[i] : alpha[i] > prob.lower[i];
            const bool can_dn = ci > 0.0 ? alpha[i] > prob.lower[i] : alpha[i] < prob.upper[i];
            if (can_up && v > st.v_up) {
                st.v_up = v;
                st.up = static_cast<std::ptrdiff_t>(i);
            }
            if (can_dn && v < st.v_dn) {
                st.v_dn = v;
                st.dn = static_cast<std::ptrdiff_t>(i);
            }
        }
    }
    double pair_viol = 0.0;
    if (st.up >= 0 && st.dn >= 0 && st.up != st.dn) pair_viol = st.v_up - st.v_dn;
    if (pair_viol < 0.0) pair_viol = 0.0;
    st.violation = std::max(single_viol, pair_viol);
    st.pair_selected = pair_viol >= single_viol && pair_viol > 0.0;
    return st;
}

double estimate_bias(const QpProblem& prob, const KktState& st) {
    if (!prob.eq) return 0.0;
    const bool have_up = st.up >= 0;
    const bool have_dn = st.dn >= 0;
    if (have_up && have_dn) return 0.5 * (st.v_up + st.v_dn);
    if (have_up) return st.v_up;
    if (have_dn) return st.v_dn;
    return 0.0;
}

void check_eq_feasible(const QpProblem& prob, const std::vector<double>& alpha) {
    if (!prob.eq) return;
    const double got = dot(prob.eq->coeffs, alpha);
    if (std::abs(got - prob.eq->rhs) > 1e-9 * (1.0 + std::abs(prob.eq->rhs)))
        throw SolverError("equality constraint infeasible within the box: reached " +
                          std::to_string(got) + ", need " + std::to_string(prob.eq->rhs));
}

// Feasible start: alpha = lower, then greedily consume the equality residual.
std::vector<double> feasible_start(const QpProblem& prob) {
    std::vector<double> alpha(prob.lower.begin(), prob.lower.end());
    if (!prob.eq) return alpha;
    const auto& c = prob.eq->coeffs;
    double r = prob.eq->rhs - dot(c, alpha);
    for (std::size_t i = 0; i < prob.size() && r != 0.0; ++i) {
        if (c[i] == 0.0) continue;
        const double cand = r / c[i];
        if (cand <= 0.0) continue;
        const double step = std::min(cand, prob.upper[i] - prob.lower[i]);
        alpha[i] += step;
        r -= c[i] * step;
    }
    check_eq_feasible(prob, alpha);
    return alpha;
}

QpSolution clamped_solution(const QpProblem& prob) {
    QpSolution sol;
    sol.alpha.assign(prob.lower.begin(), prob.lower.end());
    check_eq_feasible(prob, sol.alpha);
    const std::vector<double> g = full_gradient(prob, sol.alpha);
    sol.objective = objective_from_gradient(prob, sol.alpha, g);
    sol.bias = estimate_bias(prob, evaluate_kkt(prob, sol.alpha, g));
    sol.gap = 0.0;
    sol.iterations = 0;
    sol.kkt_violation = 0.0;
    return sol;
}

void axpy_row(const QpProblem& prob, std::size_t j, double delta, std::vector<double>& g) {
    if (delta == 0.0) return;
    const auto row = prob.q.row(j);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta * row[i];
}

// Exact minimizer of the two-variable restriction
//   F(a, b) = 1/2 (qii a^2 + 2 qij a b + qjj b^2) + gi a + gj b
// over the step rectangle [la, ua] x [lb, ub]. Bounds are deltas from the
// current iterate, so (0, 0) is always feasible and the result never
// increases the objective. For a PSD restriction the minimum is either the
// interior stationary point or sits on one of the four edges, each a 1-D
// problem solved exactly; the two single-variable moves are added so the
// step is never worse than plain coordinate descent even when rounding
// disqualifies the interior candidate. Edge coordinates keep the bound
// deltas bitwise so the caller can snap alpha onto the box exactly.
struct PairMove {
    double da = 0.0;
    double db = 0.0;
    double decrease = 0.0; // F at the chosen step, <= 0
};

PairMove minimize_pair_box(double qii, double qjj, double qij, double gi, double gj,
                           double la, double ua, double lb, double ub) {
    auto value = [&](double a, double b) {
        return 0.5 * (qii * a * a + qjj * b * b) + qij * a * b + gi * a + gj * b;
    };
    PairMove best;
    auto consider = [&](double a, double b) {
        const double f = value(a, b);
        if (f < best.decrease) best = {a, b, f};
    };
    const double det = qii * qjj - qij * qij;
    if (det > 1e-13 * (qii * qjj + qij * qij)) {
        const double a = (qij * gj - qjj * gi) / det;
        const double b = (qij * gi - qii * gj) / det;
        if (a >= la && a <= ua && b >= lb && b <= ub) consider(a, b);
    }
    auto along_b = [&](double a) { // minimize over b with a held fixed
        const double slope = gj + qij * a;
        double b;
        if (qjj > 0.0) {
            b = std::min(std::max(-slope / qjj, lb), ub);
        } else {
            b = slope < 0.0 ? ub : lb;
        }
        consider(a, b);
    };
    auto along_a = [&](double b) {
        const double slope = gi + qij * b;
        double a;
        if (qii > 0.0) {
            a = std::min(std::max(-slope / qii, la), ua);
        } else {
            a = slope < 0.0 ? ua : la;
        }
        consider(a, b);
    };
    along_b(la);
    along_b(ua);
    along_b(0.0);
    along_a(lb);
    along_a(ub);
    along_a(0.0);
    return best;
}

// Second-order partner for a box step anchored at the maximal violator i:
// maximize the decrease of the joint unconstrained Newton move, with the
// determinant floored so the nearly-flat pairs plain coordinate descent
// crawls along stay attractive. Skips coordinates the equality constraint
// owns, fixed coordinates, and partners whose Newton direction is already
// blocked by their bound. Returns -1 when nothing can move with i.
std::ptrdiff_t select_box_partner(const QpProblem& prob, const std::vector<double>& alpha,
                                  const std::vector<double>& g, std::size_t i) {
    const auto qi = prob.q.row(i);
    const double qii = prob.q.at(i, i);
    const double gi = g[i];
    const std::vector<double>* c = prob.eq ? &prob.eq->coeffs : nullptr;
    const std::size_t n = prob.size();
    double best_gain = 0.0;
    std::ptrdiff_t best = -1;
    for (std::size_t l = 0; l < n; ++l) {
        if (l == i) continue;
        if (c && (*c)[l] != 0.0) continue;
        if (prob.lower[l] == prob.upper[l]) continue;
        const double qll = prob.q.at(l, l);
        const double qil = qi[l];
        const double gl = g[l];
        const double db_sign = qil * gi - qii * gl; // sign of the Newton step in l
        if (db_sign == 0.0) continue;
        if (db_sign < 0.0 && alpha[l] <= prob.lower[l]) continue;
        if (db_sign > 0.0 && alpha[l] >= prob.upper[l]) continue;
        const double det = qii * qll - qil * qil;
        const double floor = 1e-12 * (qii * qll + qil * qil) + 1e-300;
        const double num = qll * gi * gi - 2.0 * qil * gi * gl + qii * gl * gl;
        const double gain = num / std::max(det, floor);
        if (gain > best_gain) {
            best_gain = gain;
            best = static_cast<std::ptrdiff_t>(l);
        }
    }
    return best;
}

} // namespace

void QpProblem::validate() const {
    const std::size_t n = p.size();
    if (q.size() != n || lower.size() != n || upper.size() != n)
        throw ConfigError("QpProblem: inconsistent sizes (q " + std::to_string(q.size()) +
                          ", p " + std::to_string(p.size()) + ", lower " +
                          std::to_string(lower.size()) + ", upper " +
                          std::to_string(upper.size()) + ")");
    if (eq && eq->coeffs.size() != n)
        throw ConfigError("QpProblem: equality coefficient count " +
                          std::to_string(eq->coeffs.size()) + " does not match " +
                          std::to_string(n) + " variables");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i]))
            throw ConfigError("QpProblem: lower > upper at variable " + std::to_string(i));
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw ConfigError("QpProblem: bounds must be finite at variable " + std::to_string(i));
    }
}

QpSolution solve(const QpProblem& prob, const SolveOptions& opt) {
    prob.validate();
    if (!(opt.tol > 0.0)) throw ConfigError("solve: tol must be positive");
    if (all_clamped(prob)) return clamped_solution(prob);

    std::vector<double> alpha = feasible_start(prob);

    std::vector<double> g;
    bool any_nonzero = false;
    for (double a : alpha) any_nonzero |= a != 0.0;
    if (any_nonzero) {
        g = full_gradient(prob, alpha);
    } else {
        g.assign(prob.p.begin(), prob.p.end());
    }

    const auto* c = prob.eq ? &prob.eq->coeffs : nullptr;
    std::uint64_t iterations = 0;
    double working_tol = opt.tol;
    QpSolution sol;

    while (true) {
        KktState st = evaluate_kkt(prob, alpha, g);

        if (st.violation <= working_tol) {
            // Re-check against a freshly computed gradient: the maintained one
            // accumulates rounding over many updates.
            g = full_gradient(prob, alpha);
            st = evaluate_kkt(prob, alpha, g);
            if (st.violation <= working_tol) {
                const double obj = objective_from_gradient(prob, alpha, g);
                const double gap = gap_bound(prob, alpha, g);
                if (gap <= opt.tol * (1.0 + std::abs(obj)) || working_tol <= 1e-14) {
                    sol.alpha = std::move(alpha);
                    sol.bias = estimate_bias(prob, st);
                    sol.objective = obj;
                    sol.gap = gap;
                    sol.iterations = iterations;
                    sol.kkt_violation = st.violation;
                    return sol;
                }
                working_tol = std::max(working_tol * 0.25, 1e-15);
                continue;
            }
            // Drift was real; keep iterating with the fresh gradient.
            continue;
        }

        if (iterations >= opt.max_iter) {
            g = full_gradient(prob, alpha);
            st = evaluate_kkt(prob, alpha, g);
            QpSolution best;
            best.alpha = alpha;
            best.bias = estimate_bias(prob, st);
            best.objective = objective_from_gradient(prob, alpha, g);
            best.gap = gap_bound(prob, alpha, g);
            best.iterations = iterations;
            best.kkt_violation = st.violation;
            throw QpIterationLimit("solve: iteration limit " + std::to_string(opt.max_iter) +
                                       " reached with KKT violation " +
                                       std::to_string(st.violation),
                                   std::move(best));
        }
        ++iterations;

        if (!st.pair_selected) {
            const std::size_t i = static_cast<std::size_t>(st.single);
            const double qii = prob.q.at(i, i);
            if (qii < -1e-12 * (1.0 + std::abs(qii)))
                throw SolverError("solve: negative curvature at variable " + std::to_string(i) +
                                  " (q = " + std::to_string(qii) + "); Q is not PSD");
            const std::ptrdiff_t partner = select_box_partner(prob, alpha, g, i);
            if (partner < 0) {
                // Single-variable exact minimization.
                double next;
                if (qii > 0.0) {
                    next = alpha[i] - g[i] / qii;
                    next = std::min(std::max(next, prob.lower[i]), prob.upper[i]);
                } else {
                    next = g[i] < 0.0 ? prob.upper[i] : prob.lower[i];
                }
                const double delta = next - alpha[i];
                alpha[i] = next;
                axpy_row(prob, i, delta, g);
            } else {
                // Joint exact minimization over the pair's box rectangle.
                const std::size_t j = static_cast<std::size_t>(partner);
                const double qjj = prob.q.at(j, j);
                const double qij = prob.q.at(i, j);
                if (qjj < -1e-12 * (1.0 + std::abs(qjj)))
                    throw SolverError("solve: negative curvature at variable " +
                                      std::to_string(j) + " (q = " + std::to_string(qjj) +
                                      "); Q is not PSD");
                const double det = qii * qjj - qij * qij;
                if (det < -1e-10 * (qii * qjj + qij * qij + 1.0))
                    throw SolverError("solve: negative curvature along pair (" +
                                      std::to_string(i) + ", " + std::to_string(j) +
                                      ") (det = " + std::to_string(det) + "); Q is not PSD");
                const double la = prob.lower[i] - alpha[i];
                const double ua = prob.upper[i] - alpha[i];
                const double lb = prob.lower[j] - alpha[j];
                const double ub = prob.upper[j] - alpha[j];
                const PairMove mv = minimize_pair_box(qii, qjj, qij, g[i], g[j], la, ua, lb, ub);
                double next_i = alpha[i] + mv.da;
                if (mv.da == la) next_i = prob.lower[i];
                if (mv.da == ua) next_i = prob.upper[i];
                double next_j = alpha[j] + mv.db;
                if (mv.db == lb) next_j = prob.lower[j];
                if (mv.db == ub) next_j = prob.upper[j];
                next_i = std::min(std::max(next_i, prob.lower[i]), prob.upper[i]);
                next_j = std::min(std::max(next_j, prob.lower[j]), prob.upper[j]);
                const double delta_i = next_i - alpha[i];
                const double delta_j = next_j - alpha[j];
                alpha[i] = next_i;
                alpha[j] = next_j;
                axpy_row(prob, i, delta_i, g);
                axpy_row(prob, j, delta_j, g);
            }
        } else {
            const std::size_t i = static_cast<std::size_t>(st.up);
            std::size_t j = static_cast<std::size_t>(st.dn);
            // Second-order refinement of the descent partner: among
            // coordinates movable against i, maximize the squared violation
            // gap over the direction curvature (floored so flat directions
            // stay attractive). st.dn is the fallback and always qualifies.
            {
                const auto qi = prob.q.row(i);
                const double ci0 = (*c)[i];
                const double qii = prob.q.at(i, i);
                double best_gain = -1.0;
                for (std::size_t l = 0; l < prob.size(); ++l) {
                    if (l == i) continue;
                    const double cl = (*c)[l];
                    if (cl == 0.0) continue;
                    const bool can_dn =
                        cl > 0.0 ? alpha[l] > prob.lower[l] : alpha[l] < prob.upper[l];
                    if (!can_dn) continue;
                    const double b = st.v_up + g[l] / cl;
                    if (b <= 0.0) continue;
                    const double kii = qii / (ci0 * ci0);
                    const double kll = prob.q.at(l, l) / (cl * cl);
                    const double kappa = kii + kll - 2.0 * qi[l] / (ci0 * cl);
                    const double floor = 1e-12 * (std::abs(kii) + std::abs(kll) + 1.0);
                    const double gain = b * b / std::max(kappa, floor);
                    if (gain > best_gain) {
                        best_gain = gain;
                        j = l;
                    }
                }
            }
            const double ci = (*c)[i];
            const double cj = (*c)[j];
            const double di = 1.0 / ci;
            const double dj = -1.0 / cj;
            const double phi1 = g[i] * di + g[j] * dj; // directional derivative, < 0
            const double kappa = prob.q.at(i, i) * di * di + prob.q.at(j, j) * dj * dj +
                                 2.0 * prob.q.at(i, j) * di * dj;
            const double kscale = std::abs(prob.q.at(i, i) * di * di) +
                                  std::abs(prob.q.at(j, j) * dj * dj) + 1.0;
            if (kappa < -1e-12 * kscale)
                throw SolverError("solve: negative curvature along pair (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ") (kappa = " +
                                  std::to_string(kappa) + "); Q is not PSD");
            const double t_star = kappa > 0.0 ? -phi1 / kappa : kInf;
            const double t_max_i = di > 0.0 ? (prob.upper[i] - alpha[i]) / di
                                            : (prob.lower[i] - alpha[i]) / di;
            const double t_max_j = dj > 0.0 ? (prob.upper[j] - alpha[j]) / dj
                                            : (prob.lower[j] - alpha[j]) / dj;
            const double t = std::min({t_star, t_max_i, t_max_j});
            assert(t > 0.0);
#ifndef NDEBUG
            // Monotone descent along the working direction.
            assert(phi1 * t + 0.5 * kappa * t * t <= 1e-9 * kscale);
#endif
            double next_i, next_j;
            if (t == t_max_i) {
                next_i = di > 0.0 ? prob.upper[i] : prob.lower[i];
            } else {
                next_i = alpha[i] + t * di;
            }
            if (t == t_max_j) {
                next_j = dj > 0.0 ? prob.upper[j] : prob.lower[j];
            } else {
                next_j = alpha[j] + t * dj;
            }
            const double delta_i = next_i - alpha[i];
            const double delta_j = next_j - alpha[j];
            alpha[i] = next_i;
            alpha[j] = next_j;
            axpy_row(prob, i, delta_i, g);
            axpy_row(prob, j, delta_j, g);
        }
    }
}

// ---- reference solver ---------------------------------------------------

namespace {

// Euclidean projection onto the box intersected with the equality constraint
// (bisection on the constraint multiplier; the constrained sum is monotone).
void project_feasible(const QpProblem& prob, std::vector<double>& v) {
    const std::size_t n = prob.size();
    if (!prob.eq) {
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::min(std::max(v[i], prob.lower[i]), prob.upper[i]);
        return;
    }
    const auto& c = prob.eq->coeffs;
    const double rhs = prob.eq->rhs;
    auto value_at = [&](double lambda, std::size_t i) {
        if (c[i] == 0.0) return std::min(std::max(v[i], prob.lower[i]), prob.upper[i]);
        return std::min(std::max(v[i] - lambda * c[i], prob.lower[i]), prob.upper[i]);
    };
    auto h = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (c[i] != 0.0) s += c[i] * value_at(lambda, i);
        return s;
    };
    double m = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, std::abs(v[i]));
        m = std::max(m, std::max(std::abs(prob.lower[i]), std::abs(prob.upper[i])));
    }
    double cmin = kInf;
    for (std::size_t i = 0; i < n; ++i)
        if (c[i] != 0.0) cmin = std::min(cmin, std::abs(c[i]));
    if (cmin == kInf) {
        // No variable participates; rhs must already match.
        if (std::abs(rhs) > 1e-9 * (1.0 + std::abs(rhs)))
            throw SolverError("projection infeasible: empty equality with rhs " +
                              std::to_string(rhs));
        for (std::size_t i = 0; i < n; ++i) v[i] = value_at(0.0, i);
        return;
    }
    double lo = -(2.0 * m / cmin + 1.0);
    double hi = -lo;
    const double feas_tol = 1e-9 * (1.0 + std::abs(rhs));
    if (h(lo) < rhs - feas_tol || h(hi) > rhs + feas_tol)
        throw SolverError("projection infeasible: rhs " + std::to_string(rhs) +
                          " outside attainable range");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) >= rhs) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double lambda = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i) v[i] = value_at(lambda, i);
    // Push the tiny bisection residual into one strictly interior variable.
    double resid = rhs - [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += c[i] * v[i];
        return s;
    }();
    if (resid != 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (c[i] == 0.0) continue;
            const double cand = v[i] + resid / c[i];
            if (cand >= prob.lower[i] && cand <= prob.upper[i]) {
                v[i] = cand;
                break;
            }
        }
    }
}

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-12) return false;
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(b[col], b[piv]);
        }
        const double d = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        double s = b[col];
        for (std::size_t k = col + 1; k < n; ++k) s -= a[col * n + k] * b[k];
        b[col] = s / a[col * n + col];
    }
    return true;
}

// Fixes the near-active set, solves the reduced equality-constrained Newton
// system exactly and accepts the candidate when it is feasible and passes the
// full optimality check.
bool try_polish(const QpProblem& prob, std::vector<double>& alpha, double tol,
                QpSolution& out, std::uint64_t iterations) {
    const std::size_t n = prob.size();
    std::vector<std::size_t> free_idx;
    std::vector<double> cand(alpha);
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = 1e-9 * (1.0 + prob.upper[i] - prob.lower[i]);
        if (alpha[i] <= prob.lower[i] + eps) {
            cand[i] = prob.lower[i];
        } else if (alpha[i] >= prob.upper[i] - eps) {
            cand[i] = prob.upper[i];
        } else {
            free_idx.push_back(i);
        }
    }
    const std::size_t f = free_idx.size();
    const bool eq = prob.eq.has_value();
    if (f > 0) {
        const std::size_t m = f + (eq ? 1 : 0);
        std::vector<double> a(m * m, 0.0);
        std::vector<double> b(m, 0.0);
        for (std::size_t r = 0; r < f; ++r) {
            const std::size_t i = free_idx[r];
            for (std::size_t s = 0; s < f; ++s) a[r * m + s] = prob.q.at(i, free_idx[s]);
            double rhs_r = -prob.p[i];
            for (std::size_t jj = 0; jj < n; ++jj) {
                if (cand[jj] == 0.0) continue;
                bool is_free = std::binary_search(free_idx.begin(), free_idx.end(), jj);
                if (!is_free) rhs_r -= prob.q.at(i, jj) * cand[jj];
            }
            b[r] = rhs_r;
            if (eq) {
                a[r * m + f] = prob.eq->coeffs[i];
                a[f * m + r] = prob.eq->coeffs[i];
            }
        }
        if (eq) {
            double rhs_c = prob.eq->rhs;
            for (std::size_t jj = 0; jj < n; ++jj) {
                bool is_free = std::binary_search(free_idx.begin(), free_idx.end(), jj);
                if (!is_free) rhs_c -= prob.eq->coeffs[jj] * cand[jj];
            }
            b[f] = rhs_c;
        }
        if (!solve_dense(a, b, f + (eq ? 1 : 0))) return false;
        for (std::size_t r = 0; r < f; ++r) {
            const std::size_t i = free_idx[r];
            double v = b[r];
            const double eps = 1e-9 * (1.0 + prob.upper[i] - prob.lower[i]);
            if (v < prob.lower[i] - eps || v > prob.upper[i] + eps) return false;
            cand[i] = std::min(std::max(v, prob.lower[i]), prob.upper[i]);
        }
    }
    if (prob.eq) {
        const double got = dot(prob.eq->coeffs, cand);
        if (std::abs(got - prob.eq->rhs) > 1e-9 * (1.0 + std::abs(prob.eq->rhs))) return false;
    }
    const std::vector<double> g = full_gradient(prob, cand);
    const KktState st = evaluate_kkt(prob, cand, g);
    if (st.violation > tol) return false;
    const double obj = objective_from_gradient(prob, cand, g);
    const double gap = gap_bound(prob, cand, g);
    if (gap > tol * (1.0 + std::abs(obj))) return false;
    out.alpha = cand;
    out.bias = estimate_bias(prob, st);
    out.objective = obj;
    out.gap = gap;
    out.iterations = iterations;
    out.kkt_violation = st.violation;
    alpha = std::move(cand);
    return true;
}

} // namespace

QpSolution solve_reference(const QpProblem& prob, double tol) {
    prob.validate();
    if (!(tol > 0.0)) throw ConfigError("solve_reference: tol must be positive");
    const std::size_t n = prob.size();
    if (n > 200)
        throw ConfigError("solve_reference: dimension " + std::to_string(n) +
                          " exceeds the oracle limit of 200");
    if (all_clamped(prob)) return clamped_solution(prob);

    // Lipschitz bound via the row-sum norm.
    double lip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : prob.q.row(i)) s += std::abs(v);
        lip = std::max(lip, s);
    }

    std::vector<double> alpha = feasible_start(prob);
    project_feasible(prob, alpha);

    if (lip == 0.0) {
        // Q = 0: plain linear program over the feasible set.
        QpSolution sol;
        linear_minimize(prob, prob.p, sol.alpha);
        const std::vector<double> g(prob.p.begin(), prob.p.end());
        const KktState st = evaluate_kkt(prob, sol.alpha, g);
        sol.bias = estimate_bias(prob, st);
        sol.objective = dot(prob.p, sol.alpha);
        sol.gap = gap_bound(prob, sol.alpha, g);
        sol.iterations = 1;
        sol.kkt_violation = st.violation;
        return sol;
    }

    const double step = 1.0 / lip;
    QpSolution sol;
    std::uint64_t iterations = 0;
    std::vector<double> g;
    const int max_rounds = 4000;
    for (int round = 0; round < max_rounds; ++round) {
        for (int k = 0; k < 64; ++k) {
            g = full_gradient(prob, alpha);
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = alpha[i] - step * g[i];
            project_feasible(prob, trial);
            alpha = std::move(trial);
            ++iterations;
        }
        if (try_polish(prob, alpha, tol, sol, iterations)) return sol;
    }
    g = full_gradient(prob, alpha);
    const KktState st = evaluate_kkt(prob, alpha, g);
    QpSolution best;
    best.alpha = alpha;
    best.bias = estimate_bias(prob, st);
    best.objective = objective_from_gradient(prob, alpha, g);
    best.gap = gap_bound(prob, alpha, g);
    best.iterations = iterations;
    best.kkt_violation = st.violation;
    throw QpIterationLimit("solve_reference: no optimal point within " +
                               std::to_string(max_rounds) + " rounds (KKT violation " +
                               std::to_string(st.violation) + ")",
                           std::move(best));
}

double duality_gap(const QpProblem& prob, const QpSolution& solution) {
    prob.validate();
    const std::vector<double>& alpha = solution.alpha;
    if (alpha.size() != prob.size())
        throw ConfigError("duality_gap: solution has " + std::to_string(alpha.size()) +
                          " variables, problem has " + std::to_string(prob.size()));
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double feas = 1e-9 * (1.0 + prob.upper[i] - prob.lower[i]);
        if (alpha[i] < prob.lower[i] - feas || alpha[i] > prob.upper[i] + feas)
            throw SolverError("duality_gap: infeasible solution at variable " + std::to_string(i));
    }
    if (prob.eq) {
        const double got = dot(prob.eq->coeffs, alpha);
        if (std::abs(got - prob.eq->rhs) > 1e-9 * (1.0 + std::abs(prob.eq->rhs)))
            throw SolverError("duality_gap: solution violates the equality constraint (" +
                              std::to_string(got) + " vs " + std::to_string(prob.eq->rhs) + ")");
    }
    const std::vector<double> g = full_gradient(prob, alpha);
    return gap_bound(prob, alpha, g);
}

std::vector<double> compute_slacks(std::span<const double> decision_values, ConstraintSide side,
                                   double target) {
    std::vector<double> out(decision_values.size());
    for (std::size_t i = 0; i < decision_values.size(); ++i) {
        const double f = decision_values[i];
        out[i] = side == ConstraintSide::margin_at_least ? std::max(0.0, target - f)
                                                         : std::max(0.0, f - target);
    }
    return out;
}

} // namespace ocsvm
