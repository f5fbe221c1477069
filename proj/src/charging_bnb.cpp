#include "cfo/subproblems.hpp"

#include "cfo/errors.hpp"
#include "cfo/plan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

// The charging subproblem is solved in the coordinates
//   s0  curve time of the entry SoC (beta = Phi(s0)),
//   e   curve time when charging stops (t_c = e - s0),
//   a   absolute charge start tau + t_w.
// There
//   h = int_{s0}^{e} (q(a - s0 + u) r(u) + c_t) du + c_beta Phi(s0) + psi(a)
// with q(x) = kF pi(x) / eta - lambda_beta[k+1] and r the charge rate, so
// every kink of r sits on an axis-aligned plane. psi(a) is the cheapest
// split of a into tau and t_w. The feasible set is the box intersected with
// s0 <= e <= s0 + t_c^ub.

namespace cfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo;
    double hi;
};

Interval mul(Interval x, Interval y) {
    double p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}
Interval add(Interval x, Interval y) { return {x.lo + y.lo, x.hi + y.hi}; }
Interval sub(Interval x, Interval y) { return {x.lo - y.hi, x.hi - y.lo}; }
Interval scale(double c, Interval x) {
    return c >= 0.0 ? Interval{c * x.lo, c * x.hi} : Interval{c * x.hi, c * x.lo};
}
Interval hull0(Interval x) { return {std::min(0.0, x.lo), std::max(0.0, x.hi)}; }

enum Dim { S0 = 0, E = 1, A = 2 };
using Box = std::array<double, 3>;

void push_inside(std::vector<double>& xs, double x, double lo, double hi) {
    if (x > lo && x < hi) xs.push_back(x);
}

void sort_unique(std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

// Minimum of F(y) = F(y0) + int_{y0}^{y} f over [y0, y1] for linear f with
// end values f0, f1.
double quad_piece_min(double F0, double f0, double f1, double y0, double y1) {
    double m = std::min(F0, F0 + 0.5 * (f0 + f1) * (y1 - y0));
    if (f0 < 0.0 && f1 > 0.0) {
        double ys = y0 + f0 / (f0 - f1) * (y1 - y0);
        m = std::min(m, F0 + 0.5 * f0 * (ys - y0));
    }
    return m;
}

class Kernel {
public:
    Kernel(const Instance& inst, const ChargingStation& st, ObjectiveMode mode, const StopPrices& pr)
        : curve_(st.curve) {
        const InstanceParams& p = inst.params;
        const double kt = mode == ObjectiveMode::Time ? 1.0 : 0.0;
        ct_ = kt + pr.tau_out;
        cw_ = kt + pr.tau_out;
        ctau_ = pr.tau_out - pr.tau_in;
        cbeta_ = pr.beta_in - pr.beta_out;
        T_ = p.deadline_h;
        tw_lb_ = p.wait_min_h;
        tw_ub_ = p.wait_max_h;
        tc_ub_ = p.charge_max_h;

        if (mode == ObjectiveMode::Carbon) {
            const PiecewiseLinear& pi = st.intensity.curve();
            std::vector<double> xs(pi.xs().begin(), pi.xs().end());
            std::vector<double> ys(pi.ys().begin(), pi.ys().end());
            for (double& y : ys) y = y / p.efficiency - pr.beta_out;
            q_ = PiecewiseLinear(std::move(xs), std::move(ys));
        } else {
            double v = (mode == ObjectiveMode::Energy ? 1.0 / p.efficiency : 0.0) - pr.beta_out;
            q_ = PiecewiseLinear({0.0, 1.0}, {v, v});
        }

        auto knots = curve_.knots();
        auto slopes = curve_.slopes();
        for (std::size_t k = 1; k < knots.size(); ++k) {
            double next = k < slopes.size() ? slopes[k] : 0.0;
            knots_.push_back(knots[k]);
            drops_.push_back(slopes[k - 1] - next);
        }

        double s_lo = curve_.time_at(inst.reserve_kwh());
        lo_ = {s_lo, s_lo, tw_lb_};
        hi_ = {curve_.full_time(), curve_.full_time(), T_ + tw_ub_};
    }

    const Box& lo() const { return lo_; }
    const Box& hi() const { return hi_; }
    const ChargeCurve& curve() const { return curve_; }
    const std::vector<double>& knots() const { return knots_; }
    double charge_cap() const { return tc_ub_; }

    double wait_for(double a) const {
        double wlo = std::max(tw_lb_, a - T_);
        double whi = std::min(tw_ub_, a);
        double w = cw_ - ctau_ < 0.0 ? whi : wlo;
        return std::clamp(w, tw_lb_, tw_ub_);
    }

    double psi(double a) const {
        double w = wait_for(a);
        return ctau_ * (a - w) + cw_ * w;
    }

    // requires s0 <= e
    double h(double s0, double e, double a) const {
        double G = e > s0 ? integrate_intensity_rate(q_, a - s0, curve_, s0, e) : 0.0;
        return G + ct_ * (e - s0) + cbeta_ * curve_.soc_at(s0) + psi(a);
    }

    // upper end of e for a given s0
    double e_max(double s0) const { return std::min(hi_[E], s0 + tc_ub_); }

    // exact minimisation over e in [s0, e_max(s0)] for fixed (s0, a); ties go
    // to the smallest e
    std::pair<double, double> min_over_e(double s0, double a) const {
        const double lo = s0, hi = e_max(s0);
        const double base = cbeta_ * curve_.soc_at(s0) + psi(a);
        double best_e = lo;
        double best = base;
        if (!(hi > lo)) return {best_e, best};
        std::vector<double> xs{lo, hi};
        for (double u : knots_) push_inside(xs, u, lo, hi);
        for (double p : q_.xs()) push_inside(xs, p - a + s0, lo, hi);
        sort_unique(xs);
        auto better = [&](double v) { return v < best - 1e-12 * (1.0 + std::abs(best)); };
        double F = base;
        const double off = a - s0;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            double x0 = xs[k], x1 = xs[k + 1];
            double len = x1 - x0;
            if (!(len > 0.0)) continue;
            double r = curve_.rate(0.5 * (x0 + x1));
            double qa = q_.eval_clamped(off + x0);
            double qb = q_.eval_clamped(off + x1);
            double d0 = qa * r + ct_;
            double d1 = qb * r + ct_;
            if (d0 < 0.0 && d1 > 0.0) {
                double y = x0 + d0 / (d0 - d1) * len;
                double v = F + 0.5 * d0 * (y - x0);
                if (better(v)) {
                    best = v;
                    best_e = y;
                }
            }
            F += 0.5 * (d0 + d1) * len;
            if (better(F)) {
                best = F;
                best_e = x1;
            }
        }
        return {best_e, best};
    }

    bool feasible(const Box& lo, const Box& hi) const {
        return lo[S0] <= hi[E] && lo[E] <= hi[S0] + tc_ub_;
    }

    // a feasible point of the box close to `want`
    Box feasible_point(const Box& lo, const Box& hi, Box want) const {
        double s_min = std::max(lo[S0], lo[E] - tc_ub_);
        double s_max = std::min(hi[S0], hi[E]);
        want[S0] = std::clamp(want[S0], s_min, std::max(s_min, s_max));
        double e_min = std::max(lo[E], want[S0]);
        double e_max = std::min(hi[E], want[S0] + tc_ub_);
        want[E] = std::clamp(want[E], e_min, std::max(e_min, e_max));
        return want;
    }

    struct Bound {
        double lower;
        Box point;
        double value;
    };

    // lower bound of h over the feasible part of the box: the larger of a
    // mean-value bound and an interval bound
    Bound bound(const Box& lo, const Box& hi) const {
        std::array<Interval, 3> grad = gradient(lo, hi);
        Box c;
        for (int i = 0; i < 3; ++i) {
            if (grad[i].lo >= 0.0) c[i] = lo[i];
            else if (grad[i].hi <= 0.0) c[i] = hi[i];
            else c[i] = 0.5 * (lo[i] + hi[i]);
        }
        c = feasible_point(lo, hi, c);
        double hc = h(c[S0], c[E], c[A]);
        // g.(x - c) is concave in x for interval g, so its minimum over the
        // feasible polytope sits at a vertex
        double worst = kInf;
        for (const auto& [s0, e] : feasible_polygon(lo, hi)) {
            double base = mul(grad[S0], {s0 - c[S0], s0 - c[S0]}).lo +
                          mul(grad[E], {e - c[E], e - c[E]}).lo;
            for (double a : {lo[A], hi[A]})
                worst = std::min(worst, base + mul(grad[A], {a - c[A], a - c[A]}).lo);
        }
        double mv = worst == kInf ? -kInf : hc + worst;
        return {std::max(mv, natural(lo, hi)), c, hc};
    }

    // vertices of {s0 in [lo, hi], e in [lo, hi], 0 <= e - s0 <= tc_ub}
    std::vector<std::pair<double, double>> feasible_polygon(const Box& lo, const Box& hi) const {
        std::vector<std::pair<double, double>> poly{
            {lo[S0], lo[E]}, {hi[S0], lo[E]}, {hi[S0], hi[E]}, {lo[S0], hi[E]}};
        auto clip = [&](auto keep_value) { // keep points with keep_value(p) >= 0
            std::vector<std::pair<double, double>> out;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                auto P = poly[i];
                auto Q = poly[(i + 1) % poly.size()];
                double vp = keep_value(P), vq = keep_value(Q);
                if (vp >= 0.0) out.push_back(P);
                if ((vp >= 0.0) != (vq >= 0.0)) {
                    double t = vp / (vp - vq);
                    out.push_back({P.first + t * (Q.first - P.first),
                                   P.second + t * (Q.second - P.second)});
                }
            }
            poly.swap(out);
        };
        clip([](const std::pair<double, double>& x) { return x.second - x.first; });
        clip([&](const std::pair<double, double>& x) { return tc_ub_ - (x.second - x.first); });
        return poly;
    }

private:
    Interval q_range(double x0, double x1) const {
        auto [mn, mx] = q_.range(x0, x1);
        return {mn, mx};
    }

    // r is non-increasing in curve time. At the start of the charging window
    // the rate from the right matters, at its end the rate from the left.
    Interval r_start_range(double u0, double u1) const {
        return {curve_.rate(u1), curve_.rate(u0)};
    }
    Interval r_end_range(double u0, double u1) const {
        return {curve_.rate_left(u1), curve_.rate_left(u0)};
    }

    Interval psi_slope(double a0, double a1) const {
        if (!(a1 > a0)) return {0.0, 0.0};
        std::vector<double> xs{a0, a1};
        push_inside(xs, T_ + tw_lb_, a0, a1);
        push_inside(xs, tw_ub_, a0, a1);
        std::sort(xs.begin(), xs.end());
        Interval out{kInf, -kInf};
        const double d = cw_ - ctau_;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            double m = 0.5 * (xs[k] + xs[k + 1]);
            double slope = ctau_;
            if (d > 0.0 && m - T_ > tw_lb_) slope = ctau_ + d;
            else if (d < 0.0 && m < tw_ub_) slope = ctau_ + d;
            out.lo = std::min(out.lo, slope);
            out.hi = std::max(out.hi, slope);
        }
        return out;
    }

    double psi_min(double a0, double a1) const {
        double m = std::min(psi(a0), psi(a1));
        for (double k : {T_ + tw_lb_, tw_ub_})
            if (k > a0 && k < a1) m = std::min(m, psi(k));
        return m;
    }

    std::array<Interval, 3> gradient(const Box& lo, const Box& hi) const {
        const Interval off{lo[A] - hi[S0], hi[A] - lo[S0]}; // a - s0
        Interval q_end = q_range(off.lo + lo[E], off.hi + hi[E]);
        Interval r_end = r_end_range(lo[E], hi[E]);
        Interval q_start = q_range(lo[A], hi[A]);
        Interval r_start = r_start_range(lo[S0], hi[S0]);
        Interval flow_end = mul(q_end, r_end);

        Interval g_e = add(flow_end, {ct_, ct_});
        Interval g_a = add(psi_slope(lo[A], hi[A]), sub(flow_end, mul(q_start, r_start)));
        Interval g_s = sub(scale(cbeta_, r_start), add(flow_end, {ct_, ct_}));
        for (std::size_t k = 0; k < knots_.size(); ++k) {
            const double u = knots_[k];
            if (u <= lo[S0] || u >= hi[E]) continue;
            bool surely = u > hi[S0] && u < lo[E];
            Interval term = scale(drops_[k], q_range(off.lo + u, off.hi + u));
            if (!surely) term = hull0(term);
            g_a = add(g_a, term);
            g_s = sub(g_s, term);
        }
        return {g_s, g_e, g_a};
    }

    // Interval bound: with Q(u) the minimum of q over the window
    // a - s0 + u, l(u) = Q(u) r(u) + c_t bounds the integrand from below, so
    // h >= min_e L(e) + min_s0 [c_beta Phi(s0) - L(s0)] + min psi with L the
    // prefix integral of l.
    double natural(const Box& lo, const Box& hi) const {
        const double ul = lo[S0], uh = std::max(hi[E], hi[S0]);
        const double bl = lo[A] - hi[S0], bh = hi[A] - lo[S0];
        std::vector<double> xs{ul, uh, hi[S0], lo[E], hi[E]};
        push_inside(xs, lo[S0], ul, uh);
        for (double u : knots_) push_inside(xs, u, ul, uh);
        auto qx = q_.xs();
        auto qy = q_.ys();
        for (double p : qx) {
            push_inside(xs, p - bl, ul, uh);
            push_inside(xs, p - bh, ul, uh);
        }
        sort_unique(xs);

        // sweep in u keeping P = min over admissible s0 <= u of M(s0), so
        // the pairing respects s0 <= e
        double L = 0.0;                        // L(u), taking L(ul) = 0
        double M = cbeta_ * curve_.soc_at(ul); // c_beta Phi(u) - L(u)
        double P = M;                          // ul = lo[S0] is always admissible
        double best = (lo[E] <= ul && ul <= hi[E]) ? M : kInf;
        auto in_e = [&](double y0, double y1) { return y0 >= lo[E] && y1 <= hi[E]; };
        auto in_s = [&](double y0, double y1) { return y0 >= lo[S0] && y1 <= hi[S0]; };

        std::vector<double> cuts;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const double x0 = xs[k], x1 = xs[k + 1];
            if (!(x1 > x0)) continue;
            const double mid = 0.5 * (x0 + x1);
            const double r = curve_.rate(mid);
            double C = kInf;
            {
                auto first = std::upper_bound(qx.begin(), qx.end(), bl + mid);
                auto last = std::lower_bound(qx.begin(), qx.end(), bh + mid);
                for (auto it = first; it < last; ++it)
                    C = std::min(C, qy[static_cast<std::size_t>(it - qx.begin())]);
            }
            const double len = x1 - x0;
            const double f10 = q_.eval_clamped(bl + x0), f11 = q_.eval_clamped(bl + x1);
            const double f20 = q_.eval_clamped(bh + x0), f21 = q_.eval_clamped(bh + x1);
            auto Q = [&](double y) {
                double w = (y - x0) / len;
                return std::min({f10 + (f11 - f10) * w, f20 + (f21 - f20) * w, C});
            };
            cuts.assign({x0, x1});
            auto cross = [&](double v0, double v1) {
                if ((v0 < 0.0 && v1 > 0.0) || (v0 > 0.0 && v1 < 0.0))
                    cuts.push_back(x0 + v0 / (v0 - v1) * len);
            };
            cross(f10 - f20, f11 - f21);
            if (C < kInf) {
                cross(f10 - C, f11 - C);
                cross(f20 - C, f21 - C);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                const double y0 = cuts[j], y1 = cuts[j + 1];
                if (!(y1 > y0)) continue;
                const double l0 = Q(y0) * r + ct_, l1 = Q(y1) * r + ct_;
                const double m0 = cbeta_ * r - l0, m1 = cbeta_ * r - l1;
                const bool ie = in_e(y0, y1), is = in_s(y0, y1);
                if (ie && P < kInf) best = std::min(best, P + quad_piece_min(L, l0, l1, y0, y1));
                if (ie && is) {
                    // s0 <= e both inside this piece: the integral is at least
                    // the negative part of l
                    double neg = 0.0;
                    if (l0 <= 0.0 && l1 <= 0.0) neg = 0.5 * (l0 + l1) * (y1 - y0);
                    else if (l0 < 0.0) neg = 0.5 * l0 * (l0 / (l0 - l1)) * (y1 - y0);
                    else if (l1 < 0.0) neg = 0.5 * l1 * (l1 / (l1 - l0)) * (y1 - y0);
                    double phi = std::min(cbeta_ * curve_.soc_at(y0), cbeta_ * curve_.soc_at(y1));
                    best = std::min(best, phi + neg);
                }
                if (is) P = std::min(P, quad_piece_min(M, m0, m1, y0, y1));
                L += 0.5 * (l0 + l1) * (y1 - y0);
                M += 0.5 * (m0 + m1) * (y1 - y0);
            }
        }
        if (best == kInf) return -kInf;
        return best + psi_min(lo[A], hi[A]);
    }

    const ChargeCurve& curve_;
    PiecewiseLinear q_;
    std::vector<double> knots_; // curve times where the rate drops
    std::vector<double> drops_;
    double ct_ = 0, cw_ = 0, ctau_ = 0, cbeta_ = 0;
    double T_ = 0, tw_lb_ = 0, tw_ub_ = 0, tc_ub_ = 0;
    Box lo_{}, hi_{};
};

struct Node {
    Box lo;
    Box hi;
    double lower;
    std::size_t seq;
};

struct NodeOrder {
    bool operator()(const Node& x, const Node& y) const {
        if (x.lower != y.lower) return x.lower > y.lower;
        return x.seq > y.seq;
    }
};

} // namespace

StopPrices stop_prices(const DualVector& lambda, std::size_t stop) {
    if (stop + 1 >= lambda.stages())
        throw ConfigError("stop_prices: stop index beyond the multiplier vector");
    return {lambda.tau[stop], lambda.tau[stop + 1], lambda.beta[stop], lambda.beta[stop + 1]};
}

TradeoffMinimum solve_speed_subproblem(const RoadSegment& segment, ObjectiveMode mode,
                                       double lambda_tau, double lambda_beta) {
    double time_weight = mode == ObjectiveMode::Time ? 1.0 : 0.0;
    return minimize_affine_tradeoff(segment, lambda_tau + time_weight, lambda_beta);
}

double charging_tradeoff(const Instance& instance, const ChargingStation& station,
                         ObjectiveMode mode, const StopPrices& prices, double charge, double wait,
                         double soc, double arrival) {
    Stop s;
    s.arrival = arrival;
    s.wait = wait;
    s.charge = charge;
    s.soc = soc;
    double cost = stop_objective(mode, station, s, instance.params.efficiency);
    const ChargeCurve& c = station.curve;
    double phi = c.increment(charge, std::clamp(soc, 0.0, c.full_level()));
    return cost + prices.tau_out * (wait + charge) + (prices.tau_out - prices.tau_in) * arrival +
           (prices.beta_in - prices.beta_out) * soc - prices.beta_out * phi;
}

ChargingSolution solve_charging_subproblem(const Instance& instance, const ChargingStation& station,
                                           ObjectiveMode mode, const StopPrices& prices,
                                           const BnbOptions& options) {
    const InstanceParams& p = instance.params;
    if (p.wait_min_h > p.wait_max_h || p.wait_min_h < 0.0)
        throw ConfigError("charging subproblem: empty wait box");
    if (p.charge_max_h < 0.0) throw ConfigError("charging subproblem: empty charge box");
    if (!(p.deadline_h > 0.0)) throw ConfigError("charging subproblem: empty time box");
    if (!(p.efficiency > 0.0)) throw ConfigError("charging subproblem: efficiency must be positive");
    if (!(options.epsilon > 0.0)) throw ConfigError("charging subproblem: epsilon must be positive");

    Kernel K(instance, station, mode, prices);
    const Box& LO = K.lo();
    const Box& HI = K.hi();
    Box width;
    for (int i = 0; i < 3; ++i) width[i] = HI[i] - LO[i];

    double best = kInf;
    Box best_x = LO;
    auto offer = [&](const Box& x, double v) {
        if (v < best) {
            best = v;
            best_x = x;
        }
    };
    auto offer_line = [&](double s0, double a) {
        auto [e, v] = K.min_over_e(s0, a);
        offer({s0, e, a}, v);
    };

    // incumbent from a coarse (s0, a) grid, exact in e
    {
        const int ns = 5, na = 9;
        for (int i = 0; i < ns; ++i) {
            double s0 = LO[S0] + width[S0] * (ns - 1 - i) / (ns - 1);
            for (int j = 0; j < na; ++j) offer_line(s0, LO[A] + width[A] * j / (na - 1));
        }
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::size_t seq = 0;
    double pruned_min = kInf;
    const double eps = options.epsilon;

    auto push = [&](const Box& lo, const Box& hi) {
        if (!K.feasible(lo, hi)) return;
        Kernel::Bound b = K.bound(lo, hi);
        offer(b.point, b.value);
        offer_line(b.point[S0], b.point[A]);
        if (b.lower >= best - eps) {
            pruned_min = std::min(pruned_min, b.lower);
            return;
        }
        open.push({lo, hi, b.lower, seq++});
    };

    push(LO, HI);
    std::size_t nodes = 1;
    while (!open.empty()) {
        const Node& top = open.top();
        if (top.lower >= best - eps || nodes >= options.max_nodes) break;
        Node n = top;
        open.pop();
        int dim = -1;
        double widest = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (!(width[i] > 0.0)) continue;
            double w = (n.hi[i] - n.lo[i]) / width[i];
            if (w > widest) {
                widest = w;
                dim = i;
            }
        }
        if (dim < 0 || widest < 1e-13) {
            pruned_min = std::min(pruned_min, n.lower);
            continue;
        }
        double mid = 0.5 * (n.lo[dim] + n.hi[dim]);
        double cut = mid;
        if (dim != A) {
            // split on a rate kink when the range holds one
            double dist = kInf;
            for (double u : K.knots()) {
                if (u > n.lo[dim] && u < n.hi[dim] && std::abs(u - mid) < dist) {
                    dist = std::abs(u - mid);
                    cut = u;
                }
            }
        }
        Box hi1 = n.hi, lo2 = n.lo;
        hi1[dim] = cut;
        lo2[dim] = cut;
        push(n.lo, hi1);
        push(lo2, n.hi);
        nodes += 2;
    }
    double lower = std::min(pruned_min, best);
    if (!open.empty()) lower = std::min(lower, open.top().lower);

    // ties: prefer no charging, earlier start, fuller battery
    double tie = 1e-9 * std::max(1.0, std::abs(best));
    Box x = best_x;
    double v = best;
    auto attempt = [&](Box y) {
        double hv = K.h(y[S0], y[E], y[A]);
        if (hv <= v + tie) {
            x = y;
            v = std::min(v, hv);
        }
    };
    if (x[E] > x[S0]) attempt({x[S0], x[S0], x[A]});
    if (x[A] > LO[A]) attempt({x[S0], x[E], LO[A]});
    if (x[E] == x[S0] && x[S0] < HI[S0]) attempt({HI[S0], HI[S0], x[A]});

    ChargingSolution out;
    out.charge = std::clamp(x[E] - x[S0], 0.0, p.charge_max_h);
    out.wait = K.wait_for(x[A]);
    out.arrival = std::clamp(x[A] - out.wait, 0.0, p.deadline_h);
    out.soc = std::clamp(K.curve().soc_at(x[S0]), instance.reserve_kwh(), p.battery_kwh);
    out.value = charging_tradeoff(instance, station, mode, prices, out.charge, out.wait, out.soc,
                                  out.arrival);
    out.lower = std::min(lower, out.value);
    out.nodes = nodes;
    out.certified = out.value - out.lower <= eps * (1.0 + 1e-9);
    return out;
}

PassThrough solve_passthrough(const Instance& instance, const StopPrices& prices) {
    const InstanceParams& p = instance.params;
    double ctau = prices.tau_out - prices.tau_in;
    double cbeta = prices.beta_in - prices.beta_out;
    PassThrough out;
    out.tau_free = ctau == 0.0;
    out.arrival = ctau < 0.0 ? p.deadline_h : 0.0;
    out.soc_free = cbeta == 0.0;
    out.soc = cbeta > 0.0 ? instance.reserve_kwh() : p.battery_kwh;
    out.value = ctau * out.arrival + cbeta * out.soc;
    return out;
}

} // namespace cfo
