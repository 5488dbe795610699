#include <catch2/catch_amalgamated.hpp>

#include "steercert/moment.hpp"

using namespace steercert;

TEST_CASE("word set counts and order") {
    const Scenario paper = qubit_222_scenario();
    auto ws = word_set(paper);
    CHECK(ws.size() == 9);
    CHECK(word_count(paper) == 9);
    CHECK(ws[0].kind == Word::Kind::Empty);
    CHECK(ws[1].kind == Word::Kind::B);
    CHECK(ws[1].y == 0);
    CHECK(ws[2].y == 1);
    CHECK(ws[3].kind == Word::Kind::C);
    CHECK(ws[5].kind == Word::Kind::BC);

    // k_B = 3, m_b = 2, k_C = 2, m_c = 1: n_B = 4, n_C = 1, W = 10
    const Scenario sc{2, 3, 2, 2, 1};
    CHECK(word_count(sc) == 10);
    CHECK(word_set(sc).size() == 10);

    // regenerated order is stable
    auto ws2 = word_set(paper);
    for (std::size_t i = 0; i < ws.size(); ++i) {
        CHECK(ws[i].kind == ws2[i].kind);
        CHECK(ws[i].b == ws2[i].b);
        CHECK(ws[i].y == ws2[i].y);
        CHECK(ws[i].c == ws2[i].c);
        CHECK(ws[i].z == ws2[i].z);
    }
}

TEST_CASE("canonical entry reduction") {
    const Word by{Word::Kind::B, 0, 1, -1, -1};

    SECTION("diagonal pins to the first-row element") {
        const EntryClass e = canonical_entry(by, by);
        CHECK(!e.zero);
        CHECK(e.pinned());
        const EntryClass first = canonical_entry(Word{Word::Kind::Empty}, by);
        CHECK(e.key() == first.key());
        const PinnedDatum d = pinned_datum_of(e);
        CHECK(d.kind == PinnedDatum::Kind::SigmaB);
        CHECK(d.b == 0);
        CHECK(d.y == 1);
    }

    SECTION("orthogonal outcomes reduce to zero") {
        const Word b0{Word::Kind::B, 0, 0, -1, -1};
        const Word b1{Word::Kind::B, 1, 0, -1, -1};  // same setting, other outcome
        CHECK(canonical_entry(b0, b1).zero);
    }

    SECTION("marginal word against product word pins to the product") {
        const Word bc{Word::Kind::BC, 0, 1, 0, 0};
        const EntryClass e = canonical_entry(by, bc);  // same y
        CHECK(e.pinned());
        const PinnedDatum d = pinned_datum_of(e);
        CHECK(d.kind == PinnedDatum::Kind::SigmaBC);
        CHECK(d.y == 1);
        CHECK(d.z == 0);
        // and equals the (b|y, c|z) cross entry
        const Word cz{Word::Kind::C, -1, -1, 0, 0};
        CHECK(canonical_entry(by, cz).key() == e.key());
    }

    SECTION("different-setting products stay free and track adjoints") {
        const Word b0{Word::Kind::B, 0, 0, -1, -1};
        const EntryClass e = canonical_entry(b0, by);  // E_{0|0} E_{0|1}
        CHECK(!e.pinned());
        CHECK(e.bstr.size() == 2);
        const EntryClass rev = canonical_entry(by, b0);
        CHECK(rev.key() == e.adjoint().key());
        CHECK(rev.key() != e.key());
    }

    SECTION("product-product with shared setting collapses") {
        const Word bc00{Word::Kind::BC, 0, 0, 0, 0};
        const Word bc10{Word::Kind::BC, 0, 1, 0, 0};  // same z
        const EntryClass e = canonical_entry(bc00, bc10);
        CHECK(e.bstr.size() == 2);
        CHECK(e.cstr.size() == 1);  // E_{0|0}E_{0|0} collapsed
        // equals the (b|y, b'c|y'z) entry
        const EntryClass e2 = canonical_entry(Word{Word::Kind::B, 0, 0, -1, -1}, bc10);
        CHECK(e2.key() == e.key());
    }
}
