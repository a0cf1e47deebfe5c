#include "pnr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pnr {

namespace {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

double parse_double(const std::string& token, const char* context) {
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        while (used < token.size() && (token[used] == ' ' || token[used] == '\r')) ++used;
        if (used != token.size())
            throw DomainError(std::string(context) + ": bad number '" + token + "'");
        return value;
    } catch (const std::invalid_argument&) {
        throw DomainError(std::string(context) + ": bad number '" + token + "'");
    } catch (const std::out_of_range&) {
        throw DomainError(std::string(context) + ": number out of range '" + token + "'");
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DomainError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DomainError("cannot write file: " + path);
    out << contents;
    if (!out)
        throw DomainError("write failed: " + path);
}

std::string probvector_to_csv(const ProbVector& v) {
    std::string out = "p\n";
    for (int k = 0; k < v.size(); ++k) {
        out += format_double(v.p[k]);
        out += '\n';
    }
    return out;
}

ProbVector probvector_from_csv(const std::string& text, Label label) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> values;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "p") continue;  // header optional on input
        }
        values.push_back(parse_double(line, "probability csv"));
    }
    if (values.empty())
        throw DomainError("probability csv: no values");
    Eigen::VectorXd p(static_cast<int>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) p[static_cast<int>(k)] = values[k];
    return ProbVector(std::move(p), label);
}

nlohmann::json probvector_to_json(const ProbVector& v) {
    nlohmann::json j{{"label", to_string(v.label)},
                     {"p", std::vector<double>(v.p.data(), v.p.data() + v.p.size())}};
    if (v.unprojected) j["unprojected"] = true;
    return j;
}

ProbVector probvector_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("p") || !j.at("p").is_array())
        throw DomainError("probability json: expected { label, p: [...] }");
    const auto values = j.at("p").get<std::vector<double>>();
    Eigen::VectorXd p(static_cast<int>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) p[static_cast<int>(k)] = values[k];
    Label label = Label::ideal;
    if (j.contains("label")) label = label_from_string(j.at("label").get<std::string>());
    ProbVector out(std::move(p), label);
    out.unprojected = j.value("unprojected", false);
    return out;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ','))
            row.push_back(parse_double(cell, "matrix csv"));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DomainError("matrix csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DomainError("matrix csv: empty");
    Eigen::MatrixXd m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

void save_confusion(const std::string& csv_path, const ConfusionMatrix& c) {
    write_file(csv_path, matrix_to_csv(c.c));
    nlohmann::json meta{{"params_hash", c.params_hash},
                        {"n_max", c.n_max()},
                        {"format", "confusion-csv-v1"}};
    write_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

ConfusionMatrix load_confusion(const std::string& csv_path) {
    ConfusionMatrix c;
    c.c = matrix_from_csv(read_file(csv_path));
    if (c.c.rows() != c.c.cols())
        throw DomainError("confusion csv: matrix must be square");
    try {
        const auto meta = nlohmann::json::parse(read_file(csv_path + ".meta.json"));
        c.params_hash = meta.value("params_hash", std::string());
    } catch (const DomainError&) {
        // sidecar optional on load
    } catch (const nlohmann::json::parse_error&) {
    }
    return c;
}

nlohmann::json shot_to_json(const ShotRecord& shot) {
    return nlohmann::json{{"true_initial", shot.true_initial},
                          {"bits", shot.bits},
                          {"outcome", shot.outcome},
                          {"reset_attempts", shot.reset_attempts},
                          {"hidden_trajectory", shot.hidden_trajectory}};
}

ShotRecord shot_from_json(const nlohmann::json& j) {
    ShotRecord shot;
    shot.true_initial = j.at("true_initial").get<int>();
    shot.bits = j.at("bits").get<std::vector<int>>();
    shot.outcome = j.at("outcome").get<int>();
    shot.reset_attempts = j.value("reset_attempts", std::vector<int>{});
    shot.hidden_trajectory = j.value("hidden_trajectory", std::vector<int>{});
    return shot;
}

std::string shots_to_jsonl(const std::vector<ShotRecord>& shots) {
    std::string out;
    for (const auto& shot : shots) {
        out += shot_to_json(shot).dump();
        out += '\n';
    }
    return out;
}

std::vector<ShotRecord> shots_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ShotRecord> shots;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            shots.push_back(shot_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DomainError("shot archive line " + std::to_string(shots.size() + 1) + ": " +
                              e.what());
        }
    }
    return shots;
}

std::string sparse_to_jsonl(const SparseDist& dist) {
    std::string out;
    for (const auto& [digits, p] : dist.entries) {
        out += nlohmann::json{{"digits", digits}, {"p", p}}.dump();
        out += '\n';
    }
    return out;
}

SparseDist sparse_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    SparseDist dist;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            dist.entries[j.at("digits").get<std::vector<int>>()] =
                j.value("p", 0.0);
        } catch (const nlohmann::json::exception& e) {
            throw DomainError("sparse jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return dist;
}

nlohmann::json calibration_to_json(const CalibrationSet& cal) {
    const int n_basis = cal.n_basis();
    const int n = static_cast<int>(cal.basis_overlap.cols());
    std::vector<std::vector<double>> overlap(
        static_cast<std::size_t>(n_basis), std::vector<double>(static_cast<std::size_t>(n)));
    for (int j = 0; j < n_basis; ++j)
        for (int m = 0; m < n; ++m)
            overlap[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] =
                cal.basis_overlap(j, m);

    std::vector<std::vector<double>> p_cal(2, std::vector<double>(static_cast<std::size_t>(n_basis)));
    for (int b = 0; b < 2; ++b)
        for (int j = 0; j < n_basis; ++j)
            p_cal[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] = cal.p_cal(b, j);

    nlohmann::json out{{"O", overlap}, {"p_cal", p_cal}, {"prep_exposure", cal.prep_exposure}};
    if (cal.p_cal_variance.size() != 0) {
        std::vector<std::vector<double>> var(2, std::vector<double>(static_cast<std::size_t>(n_basis)));
        for (int b = 0; b < 2; ++b)
            for (int j = 0; j < n_basis; ++j)
                var[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] =
                    cal.p_cal_variance(b, j);
        out["p_cal_variance"] = var;
    }
    return out;
}

CalibrationSet calibration_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("O") || !j.contains("p_cal"))
        throw DomainError("calibration json: expected { O, p_cal, prep_exposure }");
    const auto overlap = j.at("O").get<std::vector<std::vector<double>>>();
    const auto p_cal = j.at("p_cal").get<std::vector<std::vector<double>>>();
    if (overlap.empty())
        throw DomainError("O: empty matrix");
    if (p_cal.size() != 2)
        throw DomainError("p_cal: expected two rows");

    CalibrationSet cal;
    const int n_basis = static_cast<int>(overlap.size());
    const int n = static_cast<int>(overlap.front().size());
    cal.basis_overlap.resize(n_basis, n);
    for (int row = 0; row < n_basis; ++row) {
        if (static_cast<int>(overlap[static_cast<std::size_t>(row)].size()) != n)
            throw DomainError("O: ragged rows");
        for (int col = 0; col < n; ++col)
            cal.basis_overlap(row, col) =
                overlap[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
    if (static_cast<int>(p_cal[0].size()) != n_basis || static_cast<int>(p_cal[1].size()) != n_basis)
        throw DomainError("p_cal: rows must have N_basis entries");
    cal.p_cal.resize(2, n_basis);
    for (int b = 0; b < 2; ++b)
        for (int col = 0; col < n_basis; ++col)
            cal.p_cal(b, col) = p_cal[static_cast<std::size_t>(b)][static_cast<std::size_t>(col)];
    cal.prep_exposure = j.value("prep_exposure", 0.0040);
    if (j.contains("p_cal_variance")) {
        const auto var = j.at("p_cal_variance").get<std::vector<std::vector<double>>>();
        if (var.size() != 2 || static_cast<int>(var[0].size()) != n_basis ||
            static_cast<int>(var[1].size()) != n_basis)
            throw DomainError("p_cal_variance: must be 2 x N_basis");
        cal.p_cal_variance.resize(2, n_basis);
        for (int b = 0; b < 2; ++b)
            for (int col = 0; col < n_basis; ++col)
                cal.p_cal_variance(b, col) =
                    var[static_cast<std::size_t>(b)][static_cast<std::size_t>(col)];
    }
    validate(cal);
    return cal;
}

}  // namespace pnr
