#pragma once

// Long-format dataset files. A dataset directory holds
//   observations.csv  patient_id,timestamp,variable,value   (timestamp in hours)
//   labels.csv        patient_id,label
//   variables.csv     variable,index
// Patient order follows labels.csv.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vrin/data.hpp"

namespace vrin::io {

inline constexpr const char* kObservationsFile = "observations.csv";
inline constexpr const char* kLabelsFile = "labels.csv";
inline constexpr const char* kVariablesFile = "variables.csv";

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> names);

    // Names "x0", "x1", ... for generated data.
    static Vocabulary numbered(std::size_t count);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    std::size_t index(std::string_view name) const;

private:
    std::vector<std::string> names_;
};

struct LoadedDataset {
    std::vector<IrregularSeries> series;
    Vocabulary vocabulary;
    std::size_t skipped_patients = 0;  // listed in labels.csv without any observation
};

void write_dataset(const std::filesystem::path& dir, const std::vector<IrregularSeries>& series,
                   const Vocabulary& vocabulary);
LoadedDataset read_dataset(const std::filesystem::path& dir);

Vocabulary read_vocabulary(const std::filesystem::path& file);

// Shortest text that parses back to the same double.
std::string format_number(double v);

void write_text(const std::filesystem::path& file, std::string_view contents);
std::string read_text(const std::filesystem::path& file);

}  // namespace vrin::io
