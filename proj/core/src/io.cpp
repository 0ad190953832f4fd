#include "qndc/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "qndc/error.hpp"

namespace qndc {

using nlohmann::json;

namespace {

int line_of_offset(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort source line of a key, for diagnostics.
std::string where(std::string_view text, std::string_view key)
{
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text.find(quoted);
    if (pos == std::string_view::npos) {
        return "";
    }
    return " (line " + std::to_string(line_of_offset(text, pos)) + ")";
}

class ConfigReader {
public:
    ConfigReader(std::string_view text, const json& root) : text_(text), root_(root) {}

    [[noreturn]] void fail(std::string_view field, const std::string& why) const
    {
        throw Error(ErrorKind::validation_error,
                    "config field '" + std::string(field) + "'" + where(text_, field) + ": " + why);
    }

    double number(const json& node, std::string_view field) const
    {
        if (!node.is_number()) {
            fail(field, "expected a number");
        }
        const double v = node.get<double>();
        if (!std::isfinite(v)) {
            fail(field, "must be finite");
        }
        return v;
    }

    std::optional<double> optional_number(std::string_view field) const
    {
        const auto it = root_.find(std::string(field));
        if (it == root_.end()) {
            return std::nullopt;
        }
        return number(*it, field);
    }

    Matrix matrix(const json& node, std::string_view field, Eigen::Index n) const
    {
        if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != n) {
            fail(field, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " array");
        }
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = node[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
                fail(field, "row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                m(i, j) = number(row[static_cast<std::size_t>(j)], field);
            }
        }
        return m;
    }

    void only_keys(const json& node, std::string_view field, std::initializer_list<std::string_view> allowed) const
    {
        if (!node.is_object()) {
            fail(field, "expected an object");
        }
        for (const auto& [key, value] : node.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(key, "unknown key");
            }
        }
    }

private:
    std::string_view text_;
    const json& root_;
};

int noise_index(const ConfigReader& reader, std::string_view token, std::string_view key)
{
    static constexpr std::array<std::string_view, 6> names = {"J_x", "J_y", "J_z", "S_x", "S_y", "S_z"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == token) {
            return static_cast<int>(i) + 1;
        }
    }
    int index = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
    if (ec != std::errc{} || ptr != token.data() + token.size() || index < 1 || index > 6) {
        reader.fail(key, "noise keys are 'row,col' with labels J_x..S_z or indices 1..6");
    }
    return index;
}

std::string format_double(double v)
{
    std::array<char, 32> buffer{};
    const auto [end, ec]
        = std::to_chars(buffer.data(), buffer.data() + buffer.size(), v, std::chars_format::general, 17);
    return std::string(buffer.data(), end);
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string hex(std::uint64_t v)
{
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

} // namespace

GaussianState ExperimentConfig::initial_state() const
{
    return make_initial_state(atoms, light, layout());
}

Calibration ExperimentConfig::calibration() const
{
    Calibration c;
    c.kappa = params.kappa();
    c.J33 = J33.value_or(atoms.cov(2, 2));
    c.J0 = J0.value_or(atoms.projection_noise());
    c.r_L = r_L_calibration.value_or(params.r_L);
    c.z_threshold = z_threshold;
    return c;
}

json ExperimentConfig::to_json() const
{
    json noise_entries = json::object();
    for (int i = 1; i <= 6; ++i) {
        for (int j = i; j <= 6; ++j) {
            if (noise.at(i, j) != 0.0) {
                noise_entries[std::to_string(i) + "," + std::to_string(j)] = noise.at(i, j);
            }
        }
    }
    auto rows = [](const Matrix& m) {
        json out = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                row.push_back(m(i, j));
            }
            out.push_back(row);
        }
        return out;
    };
    json j = {
        {"n_pulses", n_pulses},
        {"atoms", {{"mean_Jx", atoms.mean_Jx}, {"cov", rows(atoms.cov)}}},
        {"light", {{"mean_Sx", light.mean_Sx}, {"cov", rows(light.cov)}}},
        {"g_tau", params.g_tau},
        {"r_A", params.r_A},
        {"r_L", params.r_L},
        {"noise", noise_entries},
        {"n_shots", n_shots},
        {"seed", seed},
        {"z_threshold", z_threshold},
    };
    if (J33) {
        j["J33"] = *J33;
    }
    if (J0) {
        j["J0"] = *J0;
    }
    if (r_L_calibration) {
        j["r_L_calibration"] = *r_L_calibration;
    }
    return j;
}

ExperimentConfig parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse_error, "config line " + std::to_string(line_of_offset(text, e.byte))
                                                + ": " + e.what());
    }
    const ConfigReader reader(text, root);
    reader.only_keys(root, "<root>",
                     {"n_pulses", "atoms", "light", "kappa", "g_tau", "r_A", "r_L", "noise", "n_shots", "seed",
                      "J33", "J0", "r_L_calibration", "z_threshold"});

    ExperimentConfig config;
    if (auto it = root.find("n_pulses"); it != root.end()) {
        if (!it->is_number_integer() || it->get<int>() < 1 || it->get<int>() > max_pulses) {
            reader.fail("n_pulses", "must be an integer in 1..3");
        }
        config.n_pulses = it->get<int>();
    }

    const auto atoms = root.find("atoms");
    if (atoms == root.end()) {
        reader.fail("atoms", "missing");
    }
    reader.only_keys(*atoms, "atoms", {"coherent_spin_state", "mean_Jx", "cov"});
    if (auto css = atoms->find("coherent_spin_state"); css != atoms->end()) {
        const double n = reader.number(*css, "coherent_spin_state");
        if (n < 0.0) {
            reader.fail("coherent_spin_state", "atom number must be non-negative");
        }
        config.atoms = AtomicBlock::coherent_spin_state(n);
    } else {
        if (!atoms->contains("mean_Jx") || !atoms->contains("cov")) {
            reader.fail("atoms", "give coherent_spin_state or both mean_Jx and cov");
        }
        config.atoms.mean_Jx = reader.number(atoms->at("mean_Jx"), "mean_Jx");
        config.atoms.cov = reader.matrix(atoms->at("cov"), "cov", 3);
    }

    const auto light = root.find("light");
    if (light == root.end()) {
        reader.fail("light", "missing");
    }
    reader.only_keys(*light, "light", {"coherent_pulse", "mean_Sx", "cov"});
    if (auto cp = light->find("coherent_pulse"); cp != light->end()) {
        const double n = reader.number(*cp, "coherent_pulse");
        if (n < 0.0) {
            reader.fail("coherent_pulse", "photon number must be non-negative");
        }
        config.light = OpticalBlock::coherent_pulses(n, config.n_pulses);
    } else {
        if (!light->contains("mean_Sx") || !light->contains("cov")) {
            reader.fail("light", "give coherent_pulse or both mean_Sx and cov");
        }
        config.light.mean_Sx = reader.number(light->at("mean_Sx"), "mean_Sx");
        config.light.cov = reader.matrix(light->at("cov"), "cov", 3 * config.n_pulses);
    }

    const auto kappa = reader.optional_number("kappa");
    const auto g_tau = reader.optional_number("g_tau");
    if (kappa.has_value() == g_tau.has_value()) {
        reader.fail("kappa", "give exactly one of kappa and g_tau");
    }
    config.params.mean_Sx = config.light.mean_Sx;
    config.params.mean_Jx = config.atoms.mean_Jx;
    if (kappa) {
        if (config.light.mean_Sx == 0.0) {
            reader.fail("kappa", "needs a non-zero light mean_Sx");
        }
        config.params.g_tau = *kappa / config.light.mean_Sx;
    } else {
        config.params.g_tau = *g_tau;
    }
    config.params.r_A = reader.optional_number("r_A").value_or(1.0);
    config.params.r_L = reader.optional_number("r_L").value_or(1.0);
    if (config.params.r_A < 0.0 || config.params.r_A > 1.0) {
        reader.fail("r_A", "must lie in [0, 1], got " + format_double(config.params.r_A));
    }
    if (config.params.r_L < 0.0 || config.params.r_L > 1.0) {
        reader.fail("r_L", "must lie in [0, 1], got " + format_double(config.params.r_L));
    }

    if (auto noise = root.find("noise"); noise != root.end()) {
        if (!noise->is_object()) {
            reader.fail("noise", "expected an object of 'row,col': value entries");
        }
        NoiseModel::Block n = NoiseModel::Block::Zero();
        std::set<std::pair<int, int>> seen;
        for (const auto& [key, value] : noise->items()) {
            const auto comma = key.find(',');
            if (comma == std::string::npos) {
                reader.fail(key, "noise keys are 'row,col'");
            }
            const int i = noise_index(reader, std::string_view(key).substr(0, comma), key);
            const int j = noise_index(reader, std::string_view(key).substr(comma + 1), key);
            if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
                reader.fail(key, "duplicate noise entry");
            }
            const double v = reader.number(value, key);
            n(i - 1, j - 1) = v;
            n(j - 1, i - 1) = v;
        }
        try {
            config.noise = NoiseModel(n);
        } catch (const Error& e) {
            reader.fail("noise", e.what());
        }
    }

    if (auto it = root.find("n_shots"); it != root.end()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
            reader.fail("n_shots", "must be a positive integer");
        }
        config.n_shots = it->get<std::int64_t>();
    }
    if (auto it = root.find("seed"); it != root.end()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
            reader.fail("seed", "must be a non-negative integer");
        }
        config.seed = it->get<std::uint64_t>();
    }
    config.J33 = reader.optional_number("J33");
    config.J0 = reader.optional_number("J0");
    config.r_L_calibration = reader.optional_number("r_L_calibration");
    if (config.r_L_calibration && (*config.r_L_calibration < 0.0 || *config.r_L_calibration > 1.0)) {
        reader.fail("r_L_calibration", "must lie in [0, 1]");
    }
    config.z_threshold = reader.optional_number("z_threshold").value_or(3.0);
    if (config.z_threshold < 0.0) {
        reader.fail("z_threshold", "must be non-negative");
    }

    try {
        (void)config.initial_state();
    } catch (const Error& e) {
        throw Error(ErrorKind::validation_error, std::string("config state: ") + e.what());
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_file(path));
}

std::string format_shot_table(const ShotTable& table)
{
    static constexpr std::array<const char*, 3> columns = {"p_y", "q_y", "r_y"};
    std::string out = "shot";
    for (int k = 0; k < table.n_pulses(); ++k) {
        out += ",";
        out += columns[static_cast<std::size_t>(k)];
    }
    out += "\n";
    out.reserve(out.size() + table.rows() * static_cast<std::size_t>(table.n_pulses()) * 26);
    std::array<char, 32> buffer{};
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out += std::to_string(r);
        for (double v : table.row(r)) {
            const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), v,
                                                 std::chars_format::general, 17);
            out += ',';
            out.append(buffer.data(), end);
        }
        out += '\n';
    }
    return out;
}

ShotTable parse_shot_table(std::string_view text)
{
    auto next_line = [&text](std::string_view& line) {
        if (text.empty()) {
            return false;
        }
        const auto end = text.find('\n');
        line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        return true;
    };
    std::string_view line;
    if (!next_line(line)) {
        throw Error(ErrorKind::parse_error, "shot records: empty file");
    }
    int n_pulses = 0;
    if (line == "shot,p_y") {
        n_pulses = 1;
    } else if (line == "shot,p_y,q_y") {
        n_pulses = 2;
    } else if (line == "shot,p_y,q_y,r_y") {
        n_pulses = 3;
    } else {
        throw Error(ErrorKind::parse_error, "shot records line 1: unexpected header '" + std::string(line) + "'");
    }
    ShotTable table(n_pulses);
    std::array<double, 3> row{};
    int line_number = 1;
    while (next_line(line)) {
        ++line_number;
        if (line.empty()) {
            continue;
        }
        const char* p = line.data();
        const char* end = line.data() + line.size();
        std::int64_t shot = 0;
        auto fail = [&](const std::string& why) {
            throw Error(ErrorKind::parse_error, "shot records line " + std::to_string(line_number) + ": " + why);
        };
        auto res = std::from_chars(p, end, shot);
        if (res.ec != std::errc{}) {
            fail("bad shot index");
        }
        p = res.ptr;
        for (int k = 0; k < n_pulses; ++k) {
            if (p == end || *p != ',') {
                fail("expected " + std::to_string(n_pulses) + " values");
            }
            ++p;
            auto r = std::from_chars(p, end, row[static_cast<std::size_t>(k)]);
            if (r.ec != std::errc{}) {
                fail("bad number");
            }
            p = r.ptr;
        }
        if (p != end) {
            fail("trailing characters");
        }
        table.push_row(std::span<const double>(row.data(), static_cast<std::size_t>(n_pulses)));
    }
    return table;
}

void write_shot_table(const std::filesystem::path& path, const ShotTable& table)
{
    write_file_atomic(path, format_shot_table(table));
}

ShotTable read_shot_table(const std::filesystem::path& path)
{
    try {
        return parse_shot_table(read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse_error) {
            throw Error(ErrorKind::parse_error, path.string() + ": " + e.what());
        }
        throw;
    }
}

RecordPaths record_paths(const std::filesystem::path& prefix)
{
    const std::string base = prefix.string();
    return {base + "_atoms.csv", base + "_no_atoms.csv", base + "_meta.json"};
}

std::filesystem::path no_atoms_sibling(const std::filesystem::path& with_atoms)
{
    const std::string name = with_atoms.string();
    const std::string suffix = "_atoms.csv";
    if (name.size() < suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
        throw Error(ErrorKind::invalid_argument,
                    "cannot infer the no-atoms file for '" + name + "'; pass --no-atoms-records");
    }
    return name.substr(0, name.size() - suffix.size()) + "_no_atoms.csv";
}

void write_records(const RecordPaths& paths, const ShotRecords& records)
{
    write_shot_table(paths.with_atoms, records.with_atoms);
    write_shot_table(paths.no_atoms, records.no_atoms);
    const json meta = {
        {"format", "qndc-shot-records"},
        {"version", 1},
        {"seed", records.metadata.seed},
        {"n_shots", records.metadata.n_shots},
        {"n_pulses", records.metadata.n_pulses},
        {"params_hash", hex(records.metadata.params_hash)},
        {"arms",
         json::array({{{"label", "with_atoms"}, {"file", paths.with_atoms.filename().string()}},
                      {{"label", "no_atoms"}, {"file", paths.no_atoms.filename().string()}}})},
    };
    write_file_atomic(paths.metadata, meta.dump(2) + "\n");
}

ShotRecords read_records(const std::filesystem::path& with_atoms, const std::filesystem::path& no_atoms)
{
    ShotRecords records;
    records.with_atoms = read_shot_table(with_atoms);
    records.no_atoms = read_shot_table(no_atoms);
    if (records.with_atoms.n_pulses() != records.no_atoms.n_pulses()) {
        throw Error(ErrorKind::dimension_mismatch, "with-atoms and no-atoms records differ in pulse count");
    }
    records.metadata.n_pulses = records.with_atoms.n_pulses();
    records.metadata.n_shots = static_cast<std::int64_t>(records.with_atoms.rows());

    const std::string name = with_atoms.string();
    const std::string suffix = "_atoms.csv";
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        const std::filesystem::path meta_path = name.substr(0, name.size() - suffix.size()) + "_meta.json";
        if (std::filesystem::exists(meta_path)) {
            try {
                const auto meta = json::parse(read_file(meta_path));
                records.metadata.seed = meta.at("seed").get<std::uint64_t>();
                records.metadata.params_hash
                    = std::stoull(meta.at("params_hash").get<std::string>(), nullptr, 16);
            } catch (const std::exception& e) {
                throw Error(ErrorKind::parse_error, meta_path.string() + ": " + e.what());
            }
        }
    }
    return records;
}

json to_json(const MomentSet& m)
{
    json j = {
        {"n_pulses", m.n_pulses},
        {"var_p", number_or_null(m.var_p)},
        {"var_q", number_or_null(m.var_q)},
        {"var_r", number_or_null(m.var_r)},
        {"cov_pq", number_or_null(m.cov_pq)},
        {"cov_pr", number_or_null(m.cov_pr)},
        {"cov_qr", number_or_null(m.cov_qr)},
        {"mean_p", number_or_null(m.mean_p)},
        {"mean_q", number_or_null(m.mean_q)},
        {"mean_r", number_or_null(m.mean_r)},
    };
    if (m.n_shots) {
        j["n_shots"] = *m.n_shots;
    }
    if (m.se) {
        j["std_error"] = {
            {"var_p", number_or_null(m.se->var_p)},   {"var_q", number_or_null(m.se->var_q)},
            {"var_r", number_or_null(m.se->var_r)},   {"cov_pq", number_or_null(m.se->cov_pq)},
            {"cov_pr", number_or_null(m.se->cov_pr)}, {"cov_qr", number_or_null(m.se->cov_qr)},
        };
    }
    return j;
}

json to_json(const DeltaStats& d)
{
    return {
        {"n_pulses", d.n_pulses},
        {"d_var_p", number_or_null(d.d_var_p)},
        {"d_var_q", number_or_null(d.d_var_q)},
        {"d_var_r", number_or_null(d.d_var_r)},
        {"d_cov_pq", number_or_null(d.d_cov_pq)},
        {"d_cov_pr", number_or_null(d.d_cov_pr)},
    };
}

json to_json(const EstimatedModel& m)
{
    json j = {
        {"r_A", m.r_A},
        {"r_A_from_var", m.r_A_from_var ? json(*m.r_A_from_var) : json(nullptr)},
        {"r_A_discrepancy", m.r_A_discrepancy ? json(*m.r_A_discrepancy) : json(nullptr)},
        {"r_A_from_var_status", m.r_A_from_var_status},
        {"N33", m.noise.n33},
        {"N35", m.noise.n35},
        {"N55", m.noise.n55},
        {"negative_noise_variance", m.noise.has_negative_variance()},
        {"conditional_variance", m.conditional_variance},
        {"warnings", m.warnings},
    };
    return j;
}

json to_json(const Quantity& q)
{
    if (!q.defined()) {
        return {{"value", nullptr}, {"error", q.error}};
    }
    return {{"value", number_or_null(q.value)}, {"std_error", number_or_null(q.std_error)}};
}

json to_json(const CertificationReport& r)
{
    auto verdicts = [](const Verdicts& v) {
        return json{
            {"state_prep", v.state_prep},
            {"info_damage", v.info_damage},
            {"full_qnd", v.full_qnd ? json(*v.full_qnd) : json("unavailable")},
        };
    };
    json j = {
        {"schema_version", CertificationReport::schema_version},
        {"status", std::string(to_string(r.status))},
        {"exit_code", r.exit_code()},
        {"n_pulses", r.n_pulses},
        {"calibration",
         {{"kappa", r.calibration.kappa},
          {"J33", r.calibration.J33},
          {"J0", r.calibration.J0},
          {"r_L", r.calibration.r_L},
          {"z_threshold", r.calibration.z_threshold}}},
        {"criteria",
         {{"state_prep", CertificationReport::state_prep_criterion},
          {"info_damage", CertificationReport::info_damage_criterion},
          {"gating", "value + z_threshold * std_error must clear the threshold"}}},
        {"delta", to_json(r.delta)},
        {"d_cov_pq", to_json(r.d_cov_pq)},
        {"d_cov_pr", to_json(r.d_cov_pr)},
        {"conditional_variance", to_json(r.conditional_variance)},
        {"squeezing", {{"reduces_variance", r.squeezing.reduces_variance}, {"margin", r.squeezing.margin}}},
        {"r_A", to_json(r.r_A)},
        {"r_A_assumed_unity", r.r_A_assumed_unity},
        {"figures_of_merit",
         {{"c2_in_meter", to_json(r.figures.c2_in_meter)},
          {"c2_in_out", to_json(r.figures.c2_in_out)},
          {"c2_out_meter", to_json(r.figures.c2_out_meter)}}},
        {"nonclassicality",
         {{"dX2_s_given_m", to_json(r.nonclassical.dX2_s_given_m)},
          {"dX2_m", to_json(r.nonclassical.dX2_m)},
          {"dX2_s", to_json(r.nonclassical.dX2_s)},
          {"product_sm", to_json(r.nonclassical.product_sm)},
          {"J0", r.nonclassical.J0},
          {"dX2_s_negative", r.nonclassical.dX2_s_negative}}},
        {"verdicts", verdicts(r.verdicts)},
        {"point_verdicts", verdicts(r.point_verdicts)},
        {"reasons", r.reasons},
        {"warnings", r.warnings},
    };
    if (r.with_atoms) {
        j["moments"]["with_atoms"] = to_json(*r.with_atoms);
    }
    if (r.no_atoms) {
        j["moments"]["no_atoms"] = to_json(*r.no_atoms);
    }
    j["estimates"] = r.estimates ? to_json(*r.estimates) : json(nullptr);
    return j;
}

json to_json(const EmpiricalCheck& check)
{
    json rows = json::array();
    for (const auto& row : check.rows) {
        rows.push_back({{"moment", row.name},
                        {"predicted", row.predicted},
                        {"sampled", row.sampled},
                        {"std_error", row.std_error},
                        {"z", number_or_null(row.z)}});
    }
    return {{"passed", check.passed}, {"max_abs_z", check.max_abs_z}, {"rows", rows}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    const auto tmp = std::filesystem::path(path.string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::io_error, "cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) {
            throw Error(ErrorKind::io_error, "failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorKind::io_error, "cannot move output into '" + path.string() + "': " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace qndc
