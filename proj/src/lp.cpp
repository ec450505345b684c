#include "mot/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace mot {

int LinearProgram::add_variable(double cost_coeff, double lower_bound, double upper_bound) {
    cost.push_back(cost_coeff);
    lower.push_back(lower_bound);
    upper.push_back(upper_bound);
    return static_cast<int>(cost.size()) - 1;
}

int LinearProgram::add_row(Relation rel, double rhs_value) {
    relations.push_back(rel);
    rhs.push_back(rhs_value);
    return static_cast<int>(rhs.size()) - 1;
}

void LinearProgram::add_entry(int row, int col, double value) {
    entries.push_back({row, col, value});
}

namespace {

constexpr double kPivotTol = 1e-9;     // smallest pivot ever accepted
constexpr double kPivotStrong = 1e-7;  // preferred pivot magnitude
constexpr double kEnterTol = 1e-9;
constexpr double kDegenTol = 1e-11;
constexpr double kTauStart = 1e-10;  // expanding feasibility tolerance
constexpr double kTauGrowth = 1e-12;
constexpr int kStallWindow = 60;
constexpr int kEnterRetries = 6;

double pow2_scale(double max_abs) {
    if (max_abs <= 0.0 || !std::isfinite(max_abs)) return 1.0;
    int e = 0;
    std::frexp(max_abs, &e);
    return std::ldexp(1.0, -e + 1);  // scaled max-abs lands in [1, 2)
}

// Standardized form: min c'x, A x = b with b >= 0, x >= 0. Column order is
// [structural | slacks | artificials], with one artificial per row so a
// damaged basis can always be repaired. Rows are the original ones followed
// by one synthetic row per finite upper bound.
struct Standard {
    int m = 0;
    int n_struct = 0;
    int n_total = 0;
    int first_art = 0;  // artificial for row i sits at column first_art + i
    std::vector<int> col_start;
    std::vector<int> row_index;
    std::vector<double> value;
    std::vector<double> cost;  // scaled phase-2 costs, zero on slacks/artificials
    std::vector<double> b;

    std::vector<double> row_scale;
    std::vector<double> row_sign;  // combined relation-conversion and positivity flips
    std::vector<double> col_scale;
    std::vector<double> shift;      // lower-bound shift per structural variable
    std::vector<char> slack_basis;  // rows whose slack starts in the basis
    double cost_scale = 1.0;
    int m_orig = 0;
};

Standard standardize(const LinearProgram& lp) {
    const int n = lp.num_vars();
    const int m0 = lp.num_rows();
    if (static_cast<int>(lp.lower.size()) != n || static_cast<int>(lp.upper.size()) != n ||
        static_cast<int>(lp.relations.size()) != m0) {
        throw std::invalid_argument("LinearProgram: inconsistent dimensions");
    }
    for (const auto& e : lp.entries) {
        if (e.row < 0 || e.row >= m0 || e.col < 0 || e.col >= n || !std::isfinite(e.value)) {
            throw std::invalid_argument("LinearProgram: bad entry");
        }
    }
    for (double c : lp.cost) {
        if (!std::isfinite(c)) throw std::invalid_argument("LinearProgram: non-finite cost");
    }

    const double sense_sign = lp.sense == Sense::maximize ? -1.0 : 1.0;

    Standard s;
    s.m_orig = m0;
    s.n_struct = n;
    s.shift.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(lp.lower[static_cast<std::size_t>(j)])) {
            throw std::invalid_argument("LinearProgram: lower bounds must be finite");
        }
        s.shift[static_cast<std::size_t>(j)] = lp.lower[static_cast<std::size_t>(j)];
    }

    std::vector<int> upper_var;  // synthetic rows x_j' <= u_j - l_j
    for (int j = 0; j < n; ++j) {
        const double up = lp.upper[static_cast<std::size_t>(j)];
        if (std::isfinite(up)) {
            if (up < lp.lower[static_cast<std::size_t>(j)]) {
                throw std::invalid_argument("LinearProgram: upper < lower");
            }
            upper_var.push_back(j);
        }
    }
    const int m = m0 + static_cast<int>(upper_var.size());
    s.m = m;

    // Column-major structural matrix, duplicates summed.
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n));
    for (const auto& e : lp.entries) {
        cols[static_cast<std::size_t>(e.col)].push_back({e.row, e.value});
    }
    for (auto& c : cols) {
        std::sort(c.begin(), c.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (out > 0 && c[out - 1].first == c[k].first) {
                c[out - 1].second += c[k].second;
            } else {
                c[out++] = c[k];
            }
        }
        c.resize(out);
    }
    for (std::size_t r = 0; r < upper_var.size(); ++r) {
        cols[static_cast<std::size_t>(upper_var[r])].push_back({m0 + static_cast<int>(r), 1.0});
    }

    std::vector<Relation> rel(static_cast<std::size_t>(m), Relation::less_equal);
    for (int i = 0; i < m0; ++i) {
        rel[static_cast<std::size_t>(i)] = lp.relations[static_cast<std::size_t>(i)];
    }

    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m0; ++i) b[static_cast<std::size_t>(i)] = lp.rhs[static_cast<std::size_t>(i)];
    for (std::size_t r = 0; r < upper_var.size(); ++r) {
        // the generic lower-bound shift below turns this into u - l
        b[static_cast<std::size_t>(m0) + r] = lp.upper[static_cast<std::size_t>(upper_var[r])];
    }
    for (int j = 0; j < n; ++j) {
        const double l = s.shift[static_cast<std::size_t>(j)];
        if (l == 0.0) continue;
        for (const auto& [i, v] : cols[static_cast<std::size_t>(j)]) {
            b[static_cast<std::size_t>(i)] -= v * l;
        }
    }

    // Convert >= rows to <= form.
    std::vector<double> rel_sign(static_cast<std::size_t>(m), 1.0);
    for (int i = 0; i < m; ++i) {
        if (rel[static_cast<std::size_t>(i)] == Relation::greater_equal) {
            rel_sign[static_cast<std::size_t>(i)] = -1.0;
            b[static_cast<std::size_t>(i)] = -b[static_cast<std::size_t>(i)];
        }
    }

    // Equilibration: row pass then column pass, factors as powers of two.
    s.row_scale.assign(static_cast<std::size_t>(m), 1.0);
    s.col_scale.assign(static_cast<std::size_t>(n), 1.0);
    {
        std::vector<double> row_max(static_cast<std::size_t>(m), 0.0);
        for (int j = 0; j < n; ++j) {
            for (const auto& [i, v] : cols[static_cast<std::size_t>(j)]) {
                auto& rm = row_max[static_cast<std::size_t>(i)];
                rm = std::max(rm, std::abs(v));
            }
        }
        for (int i = 0; i < m; ++i) {
            s.row_scale[static_cast<std::size_t>(i)] =
                pow2_scale(row_max[static_cast<std::size_t>(i)]);
        }
        for (int j = 0; j < n; ++j) {
            double cmax = 0.0;
            for (const auto& [i, v] : cols[static_cast<std::size_t>(j)]) {
                cmax = std::max(cmax, std::abs(v * s.row_scale[static_cast<std::size_t>(i)]));
            }
            s.col_scale[static_cast<std::size_t>(j)] = pow2_scale(cmax);
        }
    }

    // Flip rows to make b nonnegative; a flipped inequality row ends up with
    // a -1 slack and starts on its artificial instead.
    std::vector<double> total_sign = rel_sign;
    for (int i = 0; i < m; ++i) {
        b[static_cast<std::size_t>(i)] *= s.row_scale[static_cast<std::size_t>(i)];
        if (b[static_cast<std::size_t>(i)] < 0.0) {
            total_sign[static_cast<std::size_t>(i)] = -total_sign[static_cast<std::size_t>(i)];
            b[static_cast<std::size_t>(i)] = -b[static_cast<std::size_t>(i)];
        }
    }
    s.row_sign = total_sign;

    std::vector<double> slack_coeff(static_cast<std::size_t>(m), 0.0);
    s.slack_basis.assign(static_cast<std::size_t>(m), 0);
    int n_slack = 0;
    for (int i = 0; i < m; ++i) {
        if (rel[static_cast<std::size_t>(i)] != Relation::equal) {
            slack_coeff[static_cast<std::size_t>(i)] =
                total_sign[static_cast<std::size_t>(i)] * rel_sign[static_cast<std::size_t>(i)];
            s.slack_basis[static_cast<std::size_t>(i)] =
                slack_coeff[static_cast<std::size_t>(i)] > 0.0 ? 1 : 0;
            ++n_slack;
        }
    }

    s.n_total = n + n_slack + m;
    s.first_art = n + n_slack;

    s.col_start.push_back(0);
    for (int j = 0; j < n; ++j) {
        for (const auto& [i, v] : cols[static_cast<std::size_t>(j)]) {
            const double scaled = v * total_sign[static_cast<std::size_t>(i)] *
                                  s.row_scale[static_cast<std::size_t>(i)] *
                                  s.col_scale[static_cast<std::size_t>(j)];
            if (scaled != 0.0) {
                s.row_index.push_back(i);
                s.value.push_back(scaled);
            }
        }
        s.col_start.push_back(static_cast<int>(s.row_index.size()));
    }
    for (int i = 0; i < m; ++i) {
        if (slack_coeff[static_cast<std::size_t>(i)] != 0.0) {
            s.row_index.push_back(i);
            s.value.push_back(slack_coeff[static_cast<std::size_t>(i)]);
            s.col_start.push_back(static_cast<int>(s.row_index.size()));
        }
    }
    for (int i = 0; i < m; ++i) {
        s.row_index.push_back(i);
        s.value.push_back(1.0);
        s.col_start.push_back(static_cast<int>(s.row_index.size()));
    }

    double cmax = 0.0;
    s.cost.assign(static_cast<std::size_t>(s.n_total), 0.0);
    for (int j = 0; j < n; ++j) {
        s.cost[static_cast<std::size_t>(j)] = sense_sign * lp.cost[static_cast<std::size_t>(j)] *
                                              s.col_scale[static_cast<std::size_t>(j)];
        cmax = std::max(cmax, std::abs(s.cost[static_cast<std::size_t>(j)]));
    }
    s.cost_scale = pow2_scale(cmax);
    for (int j = 0; j < n; ++j) s.cost[static_cast<std::size_t>(j)] *= s.cost_scale;
    s.b = std::move(b);
    return s;
}

enum class RunResult { phase_done, unbounded, rephase };

struct Simplex {
    const Standard& s;
    const SolveOptions& opts;
    Eigen::MatrixXd binv;
    Eigen::VectorXd xb;
    std::vector<int> basis;
    std::vector<char> in_basis;
    std::vector<double> devex;
    std::vector<double> reduced;  // pricing scratch
    std::int64_t iterations = 0;
    std::int64_t max_iterations;
    int pivots_since_refactor = 0;
    int consecutive_degenerate = 0;
    bool bland = false;
    bool basis_repaired = false;
    bool pin_artificials = false;  // valid in phase 2 only
    double tau = kTauStart;

    Simplex(const Standard& std_form, const SolveOptions& o) : s(std_form), opts(o) {
        max_iterations =
            o.max_iterations > 0 ? o.max_iterations : 50000 + 60LL * s.m + 2LL * s.n_total;
        binv = Eigen::MatrixXd::Identity(s.m, s.m);
        xb = Eigen::Map<const Eigen::VectorXd>(s.b.data(), s.m);
        basis.assign(static_cast<std::size_t>(s.m), -1);
        in_basis.assign(static_cast<std::size_t>(s.n_total), 0);
        devex.assign(static_cast<std::size_t>(s.n_total), 1.0);
        reduced.assign(static_cast<std::size_t>(s.n_total), 0.0);
        std::vector<int> slack_of_row(static_cast<std::size_t>(s.m), -1);
        for (int j = s.n_struct; j < s.first_art; ++j) {
            const int row = s.row_index[static_cast<std::size_t>(
                s.col_start[static_cast<std::size_t>(j)])];
            slack_of_row[static_cast<std::size_t>(row)] = j;
        }
        for (int i = 0; i < s.m; ++i) {
            const int col = s.slack_basis[static_cast<std::size_t>(i)]
                                ? slack_of_row[static_cast<std::size_t>(i)]
                                : s.first_art + i;
            basis[static_cast<std::size_t>(i)] = col;
            in_basis[static_cast<std::size_t>(col)] = 1;
        }
    }

    double col_dot(int j, const Eigen::VectorXd& y) const {
        double acc = 0.0;
        for (int k = s.col_start[static_cast<std::size_t>(j)];
             k < s.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
            acc += s.value[static_cast<std::size_t>(k)] *
                   y(s.row_index[static_cast<std::size_t>(k)]);
        }
        return acc;
    }

    Eigen::VectorXd ftran(int j) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(s.m);
        for (int k = s.col_start[static_cast<std::size_t>(j)];
             k < s.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
            w.noalias() += s.value[static_cast<std::size_t>(k)] *
                           binv.col(s.row_index[static_cast<std::size_t>(k)]);
        }
        return w;
    }

    Eigen::MatrixXd basis_matrix() const {
        Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(s.m, s.m);
        for (int i = 0; i < s.m; ++i) {
            const int j = basis[static_cast<std::size_t>(i)];
            for (int k = s.col_start[static_cast<std::size_t>(j)];
                 k < s.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
                bmat(s.row_index[static_cast<std::size_t>(k)], i) =
                    s.value[static_cast<std::size_t>(k)];
            }
        }
        return bmat;
    }

    // Greedy rank sweep over the current basis columns; slots that do not
    // extend the rank are re-seated on the artificial of a still uncovered
    // row. Only used when a refactorization detects a damaged basis.
    void repair_basis() {
        Eigen::MatrixXd work = basis_matrix();
        std::vector<char> row_used(static_cast<std::size_t>(s.m), 0);
        std::vector<char> slot_ok(static_cast<std::size_t>(s.m), 0);
        for (int slot = 0; slot < s.m; ++slot) {
            int pivot_row = -1;
            double best = 1e-8;
            for (int i = 0; i < s.m; ++i) {
                if (row_used[static_cast<std::size_t>(i)]) continue;
                const double v = std::abs(work(i, slot));
                if (v > best) {
                    best = v;
                    pivot_row = i;
                }
            }
            if (pivot_row < 0) continue;
            slot_ok[static_cast<std::size_t>(slot)] = 1;
            row_used[static_cast<std::size_t>(pivot_row)] = 1;
            const double inv = 1.0 / work(pivot_row, slot);
            for (int jj = slot + 1; jj < s.m; ++jj) {
                const double f = work(pivot_row, jj) * inv;
                if (f != 0.0) work.col(jj) -= f * work.col(slot);
            }
            for (int i = 0; i < s.m; ++i) {
                if (row_used[static_cast<std::size_t>(i)]) work(i, slot) = 0.0;
            }
            work.row(pivot_row).setZero();
        }
        int next_free_row = 0;
        for (int slot = 0; slot < s.m; ++slot) {
            if (slot_ok[static_cast<std::size_t>(slot)]) continue;
            while (next_free_row < s.m && row_used[static_cast<std::size_t>(next_free_row)]) {
                ++next_free_row;
            }
            const int row = next_free_row < s.m ? next_free_row++ : slot;
            in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(slot)])] = 0;
            basis[static_cast<std::size_t>(slot)] = s.first_art + row;
            in_basis[static_cast<std::size_t>(s.first_art + row)] = 1;
            basis_repaired = true;
        }
    }

    void refactor() {
        for (int attempt = 0; attempt < 2; ++attempt) {
            const Eigen::MatrixXd bmat = basis_matrix();
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
            const auto diag = lu.matrixLU().diagonal().cwiseAbs();
            const double dmax = diag.maxCoeff();
            if (dmax > 0.0 && diag.minCoeff() > 1e-11 * dmax) {
                binv = lu.inverse();
                if (binv.allFinite()) break;
            }
            repair_basis();
        }
        xb.noalias() = binv * Eigen::Map<const Eigen::VectorXd>(s.b.data(), s.m);
        pivots_since_refactor = 0;
        tau = kTauStart;
    }

    void pivot(int leave_row, int enter_col, const Eigen::VectorXd& w, double theta) {
        const Eigen::RowVectorXd br = binv.row(leave_row) / w(leave_row);
        Eigen::VectorXd f = w;
        f(leave_row) -= 1.0;
        binv.noalias() -= f * br;
        xb.noalias() -= theta * w;
        xb(leave_row) = theta;
        in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave_row)])] = 0;
        in_basis[static_cast<std::size_t>(enter_col)] = 1;
        basis[static_cast<std::size_t>(leave_row)] = enter_col;
        ++iterations;
        if (++pivots_since_refactor >= opts.refactor_every) refactor();
    }

    // Expanding-tolerance (Harris style) ratio test: pass one bounds the
    // step with the working tolerance, pass two takes the numerically
    // strongest pivot inside the window. The strictly positive minimum step
    // enforced below breaks degenerate cycling; the accumulated bound
    // violations stay under tau and drain through later pivots or a
    // refactorization.
    int ratio_test(const Eigen::VectorXd& w, double& theta_out) {
        tau += kTauGrowth;
        double theta_max = kInfinity;
        for (int i = 0; i < s.m; ++i) {
            const double wi = w(i);
            if (pin_artificials && basis[static_cast<std::size_t>(i)] >= s.first_art &&
                wi < -kPivotStrong && xb(i) <= kDegenTol) {
                theta_max = 0.0;  // a residual artificial must stay at zero
                continue;
            }
            if (wi <= kPivotTol) continue;
            theta_max = std::min(theta_max, std::max(xb(i) + tau, 0.0) / wi);
        }
        if (theta_max == kInfinity) return -1;

        int leave = -1;
        double best_pivot = 0.0;
        double theta = 0.0;
        bool have_strong = false;
        for (int i = 0; i < s.m; ++i) {
            const double wi = w(i);
            const bool forced = pin_artificials &&
                                basis[static_cast<std::size_t>(i)] >= s.first_art &&
                                wi < -kPivotStrong && xb(i) <= kDegenTol;
            if (!forced && wi <= kPivotTol) continue;
            const double ratio = forced ? 0.0 : std::max(xb(i), 0.0) / wi;
            if (ratio > theta_max) continue;
            const double mag = std::abs(wi);
            const bool strong = mag >= kPivotStrong;
            bool take = false;
            if (leave < 0) {
                take = true;
            } else if (bland) {
                take = ratio < theta - 1e-15 ||
                       (ratio <= theta + 1e-15 && basis[static_cast<std::size_t>(i)] <
                                                      basis[static_cast<std::size_t>(leave)]);
            } else if (strong && !have_strong) {
                take = true;
            } else if (strong == have_strong) {
                take = mag > best_pivot * (1.0 + 1e-12) ||
                       (mag >= best_pivot * (1.0 - 1e-12) &&
                        basis[static_cast<std::size_t>(i)] <
                            basis[static_cast<std::size_t>(leave)]);
            }
            if (take) {
                leave = i;
                best_pivot = mag;
                theta = ratio;
                have_strong = strong;
            }
        }
        if (leave >= 0) {
            theta_out = std::min(std::max(theta, kTauGrowth), std::max(theta_max, 0.0));
        }
        return leave;
    }

    // Devex weight propagation along the pivot row (computed before the
    // basis inverse is updated).
    void update_devex(int enter, int leave_row, double alpha_q, const std::vector<char>& allow) {
        const double scale = devex[static_cast<std::size_t>(enter)] / (alpha_q * alpha_q);
        const Eigen::RowVectorXd rho = binv.row(leave_row);
        double wmax = 1.0;
        for (int j = 0; j < s.first_art; ++j) {
            if (in_basis[static_cast<std::size_t>(j)] || !allow[static_cast<std::size_t>(j)]) {
                continue;
            }
            double alpha = 0.0;
            for (int k = s.col_start[static_cast<std::size_t>(j)];
                 k < s.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
                alpha += s.value[static_cast<std::size_t>(k)] *
                         rho(s.row_index[static_cast<std::size_t>(k)]);
            }
            if (alpha != 0.0) {
                auto& wj = devex[static_cast<std::size_t>(j)];
                wj = std::max(wj, alpha * alpha * scale);
                wmax = std::max(wmax, wj);
            }
        }
        devex[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave_row)])] =
            std::max(scale, 1.0);
        if (wmax > 1e8) devex.assign(devex.size(), 1.0);  // new reference framework
    }

    RunResult run(const std::vector<double>& cost, const std::vector<char>& allow, int phase) {
        Eigen::VectorXd cb(s.m);
        int nan_retries = 0;
        pin_artificials = phase == 2;
        for (;;) {
            if (iterations >= max_iterations) {
                throw SolverStalled("lp solve exceeded its pivot budget after " +
                                        std::to_string(iterations) + " pivots in phase " +
                                        std::to_string(phase),
                                    iterations, phase);
            }
            if (phase == 2 && basis_repaired) {
                // A repair may have re-seated an artificial at nonzero level;
                // feasibility must then be re-established.
                basis_repaired = false;
                for (int i = 0; i < s.m; ++i) {
                    if (basis[static_cast<std::size_t>(i)] >= s.first_art &&
                        xb(i) > 100.0 * opts.feas_tol) {
                        return RunResult::rephase;
                    }
                }
            }
            for (int i = 0; i < s.m; ++i) {
                cb(i) = cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])];
            }
            const Eigen::VectorXd y = binv.transpose() * cb;

            bool saw_nan = false;
            for (int j = 0; j < s.first_art; ++j) {
                if (in_basis[static_cast<std::size_t>(j)] || !allow[static_cast<std::size_t>(j)]) {
                    reduced[static_cast<std::size_t>(j)] = 0.0;
                    continue;
                }
                const double d = cost[static_cast<std::size_t>(j)] - col_dot(j, y);
                if (!std::isfinite(d)) {
                    saw_nan = true;
                    break;
                }
                reduced[static_cast<std::size_t>(j)] = d;
            }
            if (saw_nan) {
                if (++nan_retries > 2) {
                    throw SolverStalled("numerical breakdown in pricing", iterations, phase);
                }
                repair_basis();
                refactor();
                continue;
            }

            // Entering candidates by devex score; a column whose ratio test
            // offers only a weak pivot is set aside and the next candidate
            // tried, so the maintained inverse stays well conditioned.
            std::vector<int> skipped;
            int enter = -1;
            int leave = -1;
            double theta = 0.0;
            Eigen::VectorXd w;
            for (int attempt = 0; attempt <= kEnterRetries; ++attempt) {
                enter = -1;
                double best_score = 0.0;
                for (int j = 0; j < s.first_art; ++j) {
                    if (in_basis[static_cast<std::size_t>(j)] ||
                        !allow[static_cast<std::size_t>(j)]) {
                        continue;
                    }
                    const double d = reduced[static_cast<std::size_t>(j)];
                    if (d >= -kEnterTol) continue;
                    bool skip = false;
                    for (int sj : skipped) skip = skip || sj == j;
                    if (skip) continue;
                    if (bland) {
                        enter = j;
                        break;
                    }
                    const double score = d * d / devex[static_cast<std::size_t>(j)];
                    if (score > best_score) {
                        best_score = score;
                        enter = j;
                    }
                }
                if (enter < 0) {
                    if (!skipped.empty()) {
                        enter = skipped.front();  // only weak-pivot columns remain
                        w = ftran(enter);
                        leave = ratio_test(w, theta);
                        break;
                    }
                    return RunResult::phase_done;
                }
                w = ftran(enter);
                if (!w.allFinite()) {
                    if (++nan_retries > 2) {
                        throw SolverStalled("numerical breakdown in ftran", iterations, phase);
                    }
                    repair_basis();
                    refactor();
                    leave = -2;
                    break;
                }
                leave = ratio_test(w, theta);
                if (leave < 0) return RunResult::unbounded;
                if (std::abs(w(leave)) >= kPivotStrong || attempt == kEnterRetries) break;
                skipped.push_back(enter);
                leave = -2;
            }
            if (leave == -2) continue;
            if (leave < 0) return RunResult::unbounded;

            const bool risky = std::abs(w(leave)) < kPivotStrong;
            const bool degenerate = theta <= kDegenTol;
            if (!bland) update_devex(enter, leave, w(leave), allow);
            pivot(leave, enter, w, theta);
            if (risky) refactor();
            if (degenerate) {
                if (++consecutive_degenerate >= kStallWindow) bland = true;
            } else {
                consecutive_degenerate = 0;
                bland = false;
            }
        }
    }

    double objective(const std::vector<double>& cost) const {
        double acc = 0.0;
        for (int i = 0; i < s.m; ++i) {
            acc += cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] * xb(i);
        }
        return acc;
    }

    // Swap basic artificials for structural/slack columns where a nonzero
    // pivot exists; rows with none are redundant and keep their artificial
    // pinned at zero.
    void drive_out_artificials() {
        for (int i = 0; i < s.m; ++i) {
            if (basis[static_cast<std::size_t>(i)] < s.first_art || xb(i) > kDegenTol) continue;
            const Eigen::RowVectorXd row = binv.row(i);
            for (int j = 0; j < s.first_art; ++j) {
                if (in_basis[static_cast<std::size_t>(j)]) continue;
                double alpha = 0.0;
                for (int k = s.col_start[static_cast<std::size_t>(j)];
                     k < s.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
                    alpha += s.value[static_cast<std::size_t>(k)] *
                             row(s.row_index[static_cast<std::size_t>(k)]);
                }
                if (std::abs(alpha) > 1e-6) {
                    const Eigen::VectorXd w = ftran(j);
                    pivot(i, j, w, 0.0);
                    break;
                }
            }
        }
    }
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& opts) {
    const Standard s = standardize(lp);
    Simplex splx(s, opts);

    std::vector<double> p1_cost(static_cast<std::size_t>(s.n_total), 0.0);
    for (int j = s.first_art; j < s.n_total; ++j) p1_cost[static_cast<std::size_t>(j)] = 1.0;
    std::vector<char> allow(static_cast<std::size_t>(s.n_total), 1);
    for (int j = s.first_art; j < s.n_total; ++j) allow[static_cast<std::size_t>(j)] = 0;

    double bnorm = 0.0;
    for (double v : s.b) bnorm = std::max(bnorm, std::abs(v));
    const double p1_tol = 10.0 * opts.feas_tol * (1.0 + bnorm);

    LpSolution sol;
    bool bounded = true;
    for (int round = 0;; ++round) {
        if (splx.run(p1_cost, allow, 1) == RunResult::unbounded) {
            throw SolverStalled("phase-1 reported an unbounded direction", splx.iterations, 1);
        }
        if (splx.objective(p1_cost) > p1_tol) {
            sol.status = LpStatus::infeasible;
            sol.iterations = splx.iterations;
            return sol;
        }
        splx.drive_out_artificials();
        splx.bland = false;
        splx.consecutive_degenerate = 0;
        splx.devex.assign(splx.devex.size(), 1.0);

        const RunResult r = splx.run(s.cost, allow, 2);
        if (r != RunResult::rephase) {
            bounded = r == RunResult::phase_done;
            break;
        }
        if (round >= 3) {
            throw SolverStalled("basis repair loop did not converge", splx.iterations, 2);
        }
    }
    if (bounded) {
        // The maintained inverse can be up to refactor_every pivots stale;
        // recompute the basic solution exactly and re-optimize until no
        // further pivots are needed.
        for (int pass = 0; pass < 3; ++pass) {
            splx.refactor();
            const std::int64_t before = splx.iterations;
            const RunResult r = splx.run(s.cost, allow, 2);
            if (r == RunResult::unbounded) {
                bounded = false;
                break;
            }
            if (r == RunResult::phase_done && splx.iterations == before) break;
        }
    }
    sol.iterations = splx.iterations;
    if (!bounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    const int n = lp.num_vars();
    const int m0 = lp.num_rows();
    const double sense_sign = lp.sense == Sense::maximize ? -1.0 : 1.0;

    std::vector<double> xhat(static_cast<std::size_t>(s.n_total), 0.0);
    for (int i = 0; i < s.m; ++i) {
        xhat[static_cast<std::size_t>(splx.basis[static_cast<std::size_t>(i)])] =
            std::max(splx.xb(i), 0.0);
    }
    sol.primal.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        sol.primal[static_cast<std::size_t>(j)] =
            s.col_scale[static_cast<std::size_t>(j)] * xhat[static_cast<std::size_t>(j)] +
            s.shift[static_cast<std::size_t>(j)];
    }

    Eigen::VectorXd cb(s.m);
    for (int i = 0; i < s.m; ++i) {
        cb(i) = s.cost[static_cast<std::size_t>(splx.basis[static_cast<std::size_t>(i)])];
    }
    const Eigen::VectorXd yhat = splx.binv.transpose() * cb;

    sol.dual.assign(static_cast<std::size_t>(m0), 0.0);
    for (int i = 0; i < m0; ++i) {
        sol.dual[static_cast<std::size_t>(i)] = sense_sign / s.cost_scale *
                                                s.row_sign[static_cast<std::size_t>(i)] *
                                                s.row_scale[static_cast<std::size_t>(i)] * yhat(i);
    }

    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
        obj += lp.cost[static_cast<std::size_t>(j)] * sol.primal[static_cast<std::size_t>(j)];
    }
    sol.objective = obj;

    // Reduced costs of the original variables against the reported row duals.
    sol.reduced_cost.assign(lp.cost.begin(), lp.cost.end());
    std::vector<double> row_activity(static_cast<std::size_t>(m0), 0.0);
    for (const auto& e : lp.entries) {
        row_activity[static_cast<std::size_t>(e.row)] +=
            e.value * sol.primal[static_cast<std::size_t>(e.col)];
        sol.reduced_cost[static_cast<std::size_t>(e.col)] -=
            e.value * sol.dual[static_cast<std::size_t>(e.row)];
    }

    double max_resid = 0.0;
    for (int i = 0; i < m0; ++i) {
        const double gap =
            row_activity[static_cast<std::size_t>(i)] - lp.rhs[static_cast<std::size_t>(i)];
        switch (lp.relations[static_cast<std::size_t>(i)]) {
            case Relation::equal: max_resid = std::max(max_resid, std::abs(gap)); break;
            case Relation::less_equal: max_resid = std::max(max_resid, gap); break;
            case Relation::greater_equal: max_resid = std::max(max_resid, -gap); break;
        }
    }
    for (int j = 0; j < n; ++j) {
        const double x = sol.primal[static_cast<std::size_t>(j)];
        max_resid = std::max(max_resid, lp.lower[static_cast<std::size_t>(j)] - x);
        if (std::isfinite(lp.upper[static_cast<std::size_t>(j)])) {
            max_resid = std::max(max_resid, x - lp.upper[static_cast<std::size_t>(j)]);
        }
    }
    sol.max_primal_residual = std::max(max_resid, 0.0);

    // Duality gap and complementarity in the standardized equality frame,
    // where strong duality is exact; converted back to objective units.
    {
        double obj_std = 0.0;
        for (int j = 0; j < s.n_total; ++j) {
            obj_std += s.cost[static_cast<std::size_t>(j)] * xhat[static_cast<std::size_t>(j)];
        }
        double dual_std = 0.0;
        for (int i = 0; i < s.m; ++i) dual_std += s.b[static_cast<std::size_t>(i)] * yhat(i);
        sol.duality_gap = std::abs(obj_std - dual_std) / s.cost_scale;

        double comp = 0.0;
        for (int j = 0; j < s.first_art; ++j) {
            const double x = xhat[static_cast<std::size_t>(j)];
            if (x == 0.0) continue;
            double d = s.cost[static_cast<std::size_t>(j)];
            for (int k = s.col_start[static_cast<std::size_t>(j)];
                 k < s.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
                d -= s.value[static_cast<std::size_t>(k)] *
                     yhat(s.row_index[static_cast<std::size_t>(k)]);
            }
            comp = std::max(comp, std::abs(d * x));
        }
        sol.complementarity = comp / s.cost_scale;
    }

    sol.status = LpStatus::optimal;
    return sol;
}

void write_mps(const LinearProgram& lp, std::ostream& os, const std::string& name) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12E", v);
        return std::string(buf);
    };
    auto row_name = [](int i) {
        char b[16];
        std::snprintf(b, sizeof(b), "R%07d", i);
        return std::string(b);
    };
    auto col_name = [](int j) {
        char b[16];
        std::snprintf(b, sizeof(b), "C%07d", j);
        return std::string(b);
    };

    os << "NAME          " << name << "\n";
    os << "ROWS\n";
    os << " N  COST\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        const char rel = lp.relations[static_cast<std::size_t>(i)] == Relation::equal        ? 'E'
                         : lp.relations[static_cast<std::size_t>(i)] == Relation::less_equal ? 'L'
                                                                                             : 'G';
        os << " " << rel << "  " << row_name(i) << "\n";
    }
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(lp.num_vars()));
    for (const auto& e : lp.entries) {
        cols[static_cast<std::size_t>(e.col)].push_back({e.row, e.value});
    }
    os << "COLUMNS\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        auto& c = cols[static_cast<std::size_t>(j)];
        std::sort(c.begin(), c.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<int, double>> merged;
        for (const auto& [r, v] : c) {
            if (!merged.empty() && merged.back().first == r) {
                merged.back().second += v;
            } else {
                merged.emplace_back(r, v);
            }
        }
        if (lp.cost[static_cast<std::size_t>(j)] != 0.0) {
            merged.insert(merged.begin(), {-1, lp.cost[static_cast<std::size_t>(j)]});
        }
        for (const auto& [r, v] : merged) {
            os << "    " << col_name(j) << "  "
               << (r < 0 ? std::string("COST    ") : row_name(r)) << "  " << num(v) << "\n";
        }
    }
    os << "RHS\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        if (lp.rhs[static_cast<std::size_t>(i)] != 0.0) {
            os << "    RHS       " << row_name(i) << "  "
               << num(lp.rhs[static_cast<std::size_t>(i)]) << "\n";
        }
    }
    os << "BOUNDS\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (lp.lower[static_cast<std::size_t>(j)] != 0.0) {
            os << " LO BND       " << col_name(j) << "  "
               << num(lp.lower[static_cast<std::size_t>(j)]) << "\n";
        }
        if (std::isfinite(lp.upper[static_cast<std::size_t>(j)])) {
            os << " UP BND       " << col_name(j) << "  "
               << num(lp.upper[static_cast<std::size_t>(j)]) << "\n";
        }
    }
    os << "ENDATA\n";
}

}  // namespace mot
