#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steercert/errors.hpp"
#include "steercert/matrix.hpp"

namespace steercert {

/// One coefficient of a linear operator on the block-diagonal variable.
/// For a PSD block, (row, col) with row <= col addresses the symmetric entry
/// pair once: the coefficient applies to X_rc (== X_cr).  For the nonnegative
/// block (block == number of PSD blocks), row == col is the variable index.
struct ConicEntry {
    int block;
    int row;
    int col;
    double value;
};

/// Sparse description of <A, X> over the block variable.
struct LinearOperator {
    std::vector<ConicEntry> entries;

    void add(int block, int row, int col, double value) {
        if (row > col) std::swap(row, col);
        entries.push_back({block, row, col, value});
    }
};

/// Conic program in standard primal form:
///   minimize <C, X>  s.t.  <A_i, X> = b_i,  X in (PSD blocks) x R^n_+.
struct ConicProgram {
    std::vector<int> psd_dims;
    int nonneg = 0;
    LinearOperator objective;
    std::vector<LinearOperator> constraints;
    std::vector<double> rhs;
    std::string description;

    int nonneg_block() const { return static_cast<int>(psd_dims.size()); }

    void add_constraint(LinearOperator a, double b) {
        constraints.push_back(std::move(a));
        rhs.push_back(b);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["description"] = description;
        j["cones"] = {{"psd", psd_dims}, {"nonneg", nonneg}};
        auto dump_op = [](const LinearOperator& op) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& e : op.entries)
                arr.push_back({e.block, e.row, e.col, e.value});
            return arr;
        };
        j["objective"] = dump_op(objective);
        j["constraints"] = nlohmann::json::array();
        for (std::size_t i = 0; i < constraints.size(); ++i)
            j["constraints"].push_back(
                {{"rhs", rhs[i]}, {"entries", dump_op(constraints[i])}});
        return j;
    }

    static ConicProgram from_json(const nlohmann::json& j) {
        ConicProgram p;
        p.description = j.value("description", "");
        p.psd_dims = j.at("cones").at("psd").get<std::vector<int>>();
        p.nonneg = j.at("cones").at("nonneg").get<int>();
        auto load_op = [](const nlohmann::json& arr) {
            LinearOperator op;
            for (const auto& e : arr)
                op.entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                                      e.at(2).get<int>(), e.at(3).get<double>()});
            return op;
        };
        p.objective = load_op(j.at("objective"));
        for (const auto& c : j.at("constraints")) {
            p.constraints.push_back(load_op(c.at("entries")));
            p.rhs.push_back(c.at("rhs").get<double>());
        }
        return p;
    }
};

} // namespace steercert
