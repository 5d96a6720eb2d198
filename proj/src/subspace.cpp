#include "hnkdv/subspace.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hnkdv {

ModeSet::ModeSet(std::set<int> ls) : levels(std::move(ls)) {
    if (levels.empty()) throw std::invalid_argument("ModeSet: empty level set");
    if (*levels.begin() < 1)
        throw std::invalid_argument("ModeSet: levels must be positive integers");
}

bool is_generator(const ModeSet& J) {
    int g = 0;
    for (int l : J.levels) g = std::gcd(g, l);
    return g == 1;
}

std::set<int> jk_iterate(const ModeSet& J, int k) {
    if (k < 0) throw std::invalid_argument("jk_iterate: k must be >= 0");
    std::set<int> base;
    for (int l : J.levels) {
        base.insert(l);
        base.insert(-l);
    }
    std::set<int> cur = base;
    for (int step = 0; step < k; ++step) {
        std::set<int> next;
        for (int i : cur)
            for (int j : base) next.insert(i + j);
        cur = std::move(next);
    }
    return cur;
}

bool SubspaceBasis::append(const TrigPoly& p) {
    // Modified Gram-Schmidt with one reorthogonalization pass.
    TrigPoly r = p;
    for (int pass = 0; pass < 2; ++pass)
        for (const TrigPoly& o : ortho_) r = tp_combine(1.0, r, -r.l2_inner(o), o);
    double rn = r.l2_norm();
    if (rn <= tol_ * (1.0 + p.l2_norm())) return false;
    elems_.push_back(p);
    ortho_.push_back(tp_scale(1.0 / rn, r));
    gram_dirty_ = true;
    return true;
}

double SubspaceBasis::distance(const TrigPoly& p) const {
    TrigPoly r = p;
    for (int pass = 0; pass < 2; ++pass)
        for (const TrigPoly& o : ortho_) r = tp_combine(1.0, r, -r.l2_inner(o), o);
    return r.l2_norm();
}

const std::vector<std::vector<double>>& SubspaceBasis::gram() const {
    if (gram_dirty_) {
        int n = dim();
        gram_.assign(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                gram_[i][j] = gram_[j][i] = elems_[i].l2_inner(elems_[j]);
        gram_dirty_ = false;
    }
    return gram_;
}

bool membership(const TrigPoly& p, const SubspaceBasis& basis, double tol) {
    return basis.distance(p) <= tol * (1.0 + p.l2_norm());
}

SubspaceBasis h0_subspace(const ModeSet& J, double tol) {
    SubspaceBasis b(tol);
    for (int l : J.sorted()) {
        b.append(TrigPoly::sine(l));
        b.append(TrigPoly::cosine(l));
    }
    return b;
}

SubspaceBasis hk_subspace(const ModeSet& J, int k, double tol) {
    if (k < 0) throw std::invalid_argument("hk_subspace: k must be >= 0");
    SubspaceBasis h0 = h0_subspace(J, tol);
    SubspaceBasis cur = h0;
    for (int step = 1; step <= k; ++step) {
        SubspaceBasis next = cur;
        // Candidates from the previous layer only; span-wise this matches
        // H_{k-1} + span Q(H_{k-1}, H_0) since Q is bilinear.
        for (const TrigPoly& psi : cur.elements())
            for (const TrigPoly& phi : h0.elements()) next.append(q_bilinear(psi, phi));
        cur = std::move(next);
    }
    return cur;
}

SaturationReport saturation_report(const ModeSet& J, int cutoff, int k_max, double tol) {
    if (cutoff < 1) throw std::invalid_argument("saturation_report: cutoff must be >= 1");
    if (k_max < 0) throw std::invalid_argument("saturation_report: k_max must be >= 0");
    SaturationReport rep;
    rep.levels = J.sorted();
    rep.cutoff = cutoff;
    rep.k_max = k_max;
    rep.generator = is_generator(J);

    SubspaceBasis h0 = h0_subspace(J, tol);
    SubspaceBasis cur = h0;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) {
            SubspaceBasis next = cur;
            for (const TrigPoly& psi : cur.elements())
                for (const TrigPoly& phi : h0.elements()) next.append(q_bilinear(psi, phi));
            cur = std::move(next);
        }
        SaturationRow row;
        row.k = k;
        row.dim = cur.dim();
        for (const TrigPoly& e : cur.elements())
            for (int m : e.modes()) row.modes_present.insert(m);
        int max_probe = std::max(cutoff, row.modes_present.empty() ? cutoff
                                                                  : *row.modes_present.rbegin());
        for (int m = 1; m <= max_probe; ++m)
            if (membership(TrigPoly::sine(m), cur, tol) &&
                membership(TrigPoly::cosine(m), cur, tol))
                row.modes_covered.insert(m);
        bool all = true;
        for (int m = 1; m <= cutoff; ++m)
            if (!row.modes_covered.count(m)) { all = false; break; }
        rep.rows.push_back(std::move(row));
        if (all && rep.first_covering_k < 0) {
            rep.first_covering_k = k;
            break;
        }
    }
    return rep;
}

} // namespace hnkdv
