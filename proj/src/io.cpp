#include "vrin/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "vrin/errors.hpp"

namespace vrin::io {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, const std::filesystem::path& file, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError(file.string() + ":" + std::to_string(line) + ": invalid number '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& file, std::string_view header) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != header) {
        throw DataError(file.string() + ": expected header '" + std::string(header) + "'");
    }
    while (std::getline(in, line)) {
        if (strip_cr(line).empty()) continue;
        lines.emplace_back(strip_cr(line));
    }
    return lines;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {}

Vocabulary Vocabulary::numbered(std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) names.push_back("x" + std::to_string(i));
    return Vocabulary(std::move(names));
}

std::size_t Vocabulary::index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    throw DataError("unknown variable '" + std::string(name) + "'");
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& file, std::string_view contents) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + file.string());
    out << contents;
    if (!out) throw DataError("failed writing " + file.string());
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_dataset(const std::filesystem::path& dir, const std::vector<IrregularSeries>& series,
                   const Vocabulary& vocabulary) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw DataError("cannot create directory " + dir.string());

    std::string obs = "patient_id,timestamp,variable,value\n";
    std::string labels = "patient_id,label\n";
    for (const auto& s : series) {
        labels += s.patient_id + "," + std::to_string(s.label) + "\n";
        for (const auto& e : s.events) {
            obs += s.patient_id + "," + format_number(e.time) + "," + vocabulary.name(e.variable) + "," +
                   format_number(e.value) + "\n";
        }
    }
    std::string vars = "variable,index\n";
    for (std::size_t i = 0; i < vocabulary.size(); ++i) vars += vocabulary.name(i) + "," + std::to_string(i) + "\n";

    write_text(dir / kObservationsFile, obs);
    write_text(dir / kLabelsFile, labels);
    write_text(dir / kVariablesFile, vars);
}

Vocabulary read_vocabulary(const std::filesystem::path& file) {
    const auto lines = read_lines(file, "variable,index");
    std::vector<std::string> names(lines.size());
    std::vector<bool> seen(lines.size(), false);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto f = split(lines[i]);
        if (f.size() != 2) throw DataError(file.string() + ":" + std::to_string(i + 2) + ": expected 2 fields");
        const double idx = parse_number(f[1], file, i + 2);
        if (idx < 0 || idx >= static_cast<double>(lines.size()) || idx != static_cast<double>(static_cast<std::size_t>(idx))) {
            throw DataError(file.string() + ":" + std::to_string(i + 2) + ": index out of range");
        }
        const auto k = static_cast<std::size_t>(idx);
        if (seen[k]) throw DataError(file.string() + ": duplicate index " + std::to_string(k));
        seen[k] = true;
        names[k] = std::string(f[0]);
    }
    return Vocabulary(std::move(names));
}

LoadedDataset read_dataset(const std::filesystem::path& dir) {
    LoadedDataset out;
    out.vocabulary = read_vocabulary(dir / kVariablesFile);

    const auto label_file = dir / kLabelsFile;
    const auto label_lines = read_lines(label_file, "patient_id,label");
    std::vector<IrregularSeries> all;
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < label_lines.size(); ++i) {
        const auto f = split(label_lines[i]);
        if (f.size() != 2) throw DataError(label_file.string() + ":" + std::to_string(i + 2) + ": expected 2 fields");
        if (f[1] != "0" && f[1] != "1") {
            throw DataError(label_file.string() + ":" + std::to_string(i + 2) + ": label must be 0 or 1");
        }
        IrregularSeries s;
        s.patient_id = std::string(f[0]);
        s.label = f[1] == "1" ? 1 : 0;
        if (!by_id.emplace(s.patient_id, all.size()).second) {
            throw DataError(label_file.string() + ": duplicate patient '" + s.patient_id + "'");
        }
        all.push_back(std::move(s));
    }

    const auto obs_file = dir / kObservationsFile;
    const auto obs_lines = read_lines(obs_file, "patient_id,timestamp,variable,value");
    for (std::size_t i = 0; i < obs_lines.size(); ++i) {
        const auto f = split(obs_lines[i]);
        if (f.size() != 4) throw DataError(obs_file.string() + ":" + std::to_string(i + 2) + ": expected 4 fields");
        auto it = by_id.find(std::string(f[0]));
        if (it == by_id.end()) {
            throw DataError(obs_file.string() + ":" + std::to_string(i + 2) + ": patient '" + std::string(f[0]) +
                            "' missing from labels");
        }
        Event e;
        e.time = parse_number(f[1], obs_file, i + 2);
        e.variable = out.vocabulary.index(f[2]);
        e.value = parse_number(f[3], obs_file, i + 2);
        all[it->second].events.push_back(e);
    }

    for (auto& s : all) {
        if (s.events.empty()) {
            ++out.skipped_patients;
        } else {
            out.series.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace vrin::io
