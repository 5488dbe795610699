#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "steercert/scenario.hpp"

namespace steercert {

/// Word labelling a row/column of the moment matrix: the empty word, a
/// single Bob or Charlie projector, or a Bob-Charlie product.  Only the
/// first (outcomes - 1) outcomes per setting appear in the word set.
struct Word {
    enum class Kind { Empty, B, C, BC };
    Kind kind = Kind::Empty;
    int b = -1, y = -1;
    int c = -1, z = -1;
};

/// Deterministic word order: empty word, Bob words (setting-major,
/// outcome-minor), Charlie words, then product words (y, z, b, c nested).
inline std::vector<Word> word_set(const Scenario& sc) {
    sc.validate();
    std::vector<Word> ws;
    ws.push_back({Word::Kind::Empty});
    for (int y = 0; y < sc.setB; ++y)
        for (int b = 0; b + 1 < sc.outB; ++b) ws.push_back({Word::Kind::B, b, y, -1, -1});
    for (int z = 0; z < sc.setC; ++z)
        for (int c = 0; c + 1 < sc.outC; ++c) ws.push_back({Word::Kind::C, -1, -1, c, z});
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z)
            for (int b = 0; b + 1 < sc.outB; ++b)
                for (int c = 0; c + 1 < sc.outC; ++c)
                    ws.push_back({Word::Kind::BC, b, y, c, z});
    return ws;
}

inline int word_count(const Scenario& sc) {
    const int nB = (sc.outB - 1) * sc.setB;
    const int nC = (sc.outC - 1) * sc.setC;
    return 1 + nB + nC + nB * nC;
}

/// A projector factor E_{outcome|setting}.
struct Factor {
    int outcome;
    int setting;
    bool operator==(const Factor&) const = default;
    auto operator<=>(const Factor&) const = default;
};

/// Product of projectors for one party, reduced by idempotence
/// (E_{b|y} E_{b|y} = E_{b|y}) and orthogonality (E_{b|y} E_{b'|y} = 0 for
/// b != b').  zero marks a vanishing product.
struct FactorString {
    std::vector<Factor> factors;
    bool zero = false;

    void reduce() {
        std::vector<Factor> out;
        for (const Factor& f : factors) {
            if (!out.empty() && out.back().setting == f.setting) {
                if (out.back().outcome == f.outcome) continue;
                zero = true;
                out.clear();
                break;
            }
            out.push_back(f);
        }
        factors = std::move(out);
    }
};

inline void append_factors(const Word& w, std::vector<Factor>& bfac, std::vector<Factor>& cfac) {
    switch (w.kind) {
        case Word::Kind::Empty: break;
        case Word::Kind::B: bfac.push_back({w.b, w.y}); break;
        case Word::Kind::C: cfac.push_back({w.c, w.z}); break;
        case Word::Kind::BC:
            bfac.push_back({w.b, w.y});
            cfac.push_back({w.c, w.z});
            break;
    }
}

/// Canonical reduction of O_v^dagger O_w: Bob and Charlie factors commute,
/// so the product is a pair (Bob string, Charlie string), each reduced by
/// projector algebra.  Words of length <= 1 per party pin the entry to an
/// assemblage element.
struct EntryClass {
    bool zero = false;
    std::vector<Factor> bstr, cstr;

    bool pinned() const { return !zero && bstr.size() <= 1 && cstr.size() <= 1; }

    std::string key() const {
        if (zero) return "0";
        std::string k = "B";
        for (const Factor& f : bstr)
            k += "(" + std::to_string(f.outcome) + "|" + std::to_string(f.setting) + ")";
        k += "C";
        for (const Factor& f : cstr)
            k += "(" + std::to_string(f.outcome) + "|" + std::to_string(f.setting) + ")";
        return k;
    }

    EntryClass adjoint() const {
        EntryClass a = *this;
        std::reverse(a.bstr.begin(), a.bstr.end());
        std::reverse(a.cstr.begin(), a.cstr.end());
        return a;
    }
};

inline EntryClass canonical_entry(const Word& v, const Word& w) {
    std::vector<Factor> vb, vc, wb, wc;
    append_factors(v, vb, vc);
    append_factors(w, wb, wc);
    // O_v^dagger reverses v's factors (projectors are self-adjoint)
    std::reverse(vb.begin(), vb.end());
    std::reverse(vc.begin(), vc.end());
    FactorString bs{std::move(vb)}, cs{std::move(vc)};
    bs.factors.insert(bs.factors.end(), wb.begin(), wb.end());
    cs.factors.insert(cs.factors.end(), wc.begin(), wc.end());
    bs.reduce();
    cs.reduce();
    EntryClass e;
    e.zero = bs.zero || cs.zero;
    if (!e.zero) {
        e.bstr = std::move(bs.factors);
        e.cstr = std::move(cs.factors);
    }
    return e;
}

/// Which first-row assemblage element a pinned entry class refers to.
struct PinnedDatum {
    enum class Kind { Rho, SigmaB, SigmaC, SigmaBC } kind;
    int b = -1, y = -1, c = -1, z = -1;
};

inline PinnedDatum pinned_datum_of(const EntryClass& e) {
    PinnedDatum d{PinnedDatum::Kind::Rho};
    if (!e.bstr.empty() && !e.cstr.empty()) {
        d.kind = PinnedDatum::Kind::SigmaBC;
        d.b = e.bstr[0].outcome;
        d.y = e.bstr[0].setting;
        d.c = e.cstr[0].outcome;
        d.z = e.cstr[0].setting;
    } else if (!e.bstr.empty()) {
        d.kind = PinnedDatum::Kind::SigmaB;
        d.b = e.bstr[0].outcome;
        d.y = e.bstr[0].setting;
    } else if (!e.cstr.empty()) {
        d.kind = PinnedDatum::Kind::SigmaC;
        d.c = e.cstr[0].outcome;
        d.z = e.cstr[0].setting;
    }
    return d;
}

} // namespace steercert
