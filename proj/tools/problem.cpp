#include "problem.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ergo::cli {

namespace {

using nlohmann::json;

double env_double(const char* name, double fallback) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << ": cannot parse '" << raw << "' as a number";
        throw ParseError(msg.str());
    }
    return v;
}

double parse_finite(const json& node, const std::string& locus) {
    if (!node.is_number()) {
        throw ParseError(locus + ": expected a number");
    }
    const double v = node.get<double>();
    if (!std::isfinite(v)) {
        throw ParseError(locus + ": number is not finite");
    }
    return v;
}

Complex parse_complex(const json& node, const std::string& locus) {
    if (!node.is_array() || node.size() != 2) {
        throw ParseError(locus + ": expected a [re, im] pair");
    }
    return {parse_finite(node[0], locus + "[0]"),
            parse_finite(node[1], locus + "[1]")};
}

CMatrix parse_matrix(const json& node, const std::string& locus) {
    if (!node.is_array() || node.empty()) {
        throw ParseError(locus + ": expected a nonempty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(node.size());
    CMatrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = node[static_cast<std::size_t>(r)];
        std::ostringstream row_locus;
        row_locus << locus << "[" << r << "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw ParseError(row_locus.str() + ": matrix must be square");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            std::ostringstream cell;
            cell << row_locus.str() << "[" << c << "]";
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                    cell.str());
        }
    }
    return m;
}

}  // namespace

Tolerances env_tolerances() {
    Tolerances tol;
    tol.hermiticity = env_double("ERGO_HERMITICITY_TOL", tol.hermiticity);
    tol.degeneracy = env_double("ERGO_DEGENERACY_TOL", tol.degeneracy);
    tol.resonance = env_double("ERGO_RESONANCE_TOL", tol.resonance);
    return tol;
}

double resolve_degeneracy_tol(const Tolerances& tol,
                              const RVector& eigenvalues) {
    if (tol.degeneracy >= 0.0) {
        return tol.degeneracy;
    }
    return default_degeneracy_tol(eigenvalues);
}

ProblemFile load_problem(const std::string& path, const Tolerances& defaults) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open problem file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("problem file is not valid JSON: ") +
                         e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("top level: expected an object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "hamiltonian" && key != "initial_state" &&
            key != "custom_observables" && key != "tolerances") {
            throw ParseError("top level: unknown field '" + key + "'");
        }
    }
    if (!doc.contains("hamiltonian")) {
        throw ParseError("top level: missing 'hamiltonian'");
    }
    if (!doc.contains("initial_state")) {
        throw ParseError("top level: missing 'initial_state'");
    }

    ProblemFile problem;
    problem.tolerances = defaults;
    problem.hamiltonian = parse_matrix(doc["hamiltonian"], "hamiltonian");
    const Eigen::Index dim = problem.hamiltonian.rows();

    const json& state = doc["initial_state"];
    if (!state.is_array() || static_cast<Eigen::Index>(state.size()) != dim) {
        std::ostringstream msg;
        msg << "initial_state: expected " << dim << " amplitudes";
        throw ParseError(msg.str());
    }
    CVector psi(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        std::ostringstream cell;
        cell << "initial_state[" << k << "]";
        psi[k] = parse_complex(state[static_cast<std::size_t>(k)], cell.str());
    }
    if (psi.norm() == 0.0) {
        throw ParseError("initial_state: zero vector cannot be normalized");
    }
    problem.initial_state = psi / psi.norm();

    if (doc.contains("custom_observables")) {
        const json& observables = doc["custom_observables"];
        if (!observables.is_object()) {
            throw ParseError("custom_observables: expected an object");
        }
        for (const auto& [name, value] : observables.items()) {
            const CMatrix m =
                parse_matrix(value, "custom_observables." + name);
            if (m.rows() != dim) {
                throw ParseError("custom_observables." + name +
                                 ": dimension does not match the Hamiltonian");
            }
            problem.custom_observables.emplace_back(name, m);
        }
    }

    if (doc.contains("tolerances")) {
        const json& tol = doc["tolerances"];
        if (!tol.is_object()) {
            throw ParseError("tolerances: expected an object");
        }
        for (const auto& [key, value] : tol.items()) {
            const double v = parse_finite(value, "tolerances." + key);
            if (key == "hermiticity_tol") {
                problem.tolerances.hermiticity = v;
            } else if (key == "degeneracy_tol") {
                problem.tolerances.degeneracy = v;
            } else if (key == "resonance_tol") {
                problem.tolerances.resonance = v;
            } else {
                throw ParseError("tolerances: unknown field '" + key + "'");
            }
        }
    }
    return problem;
}

}  // namespace ergo::cli
