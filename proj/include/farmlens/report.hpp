#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "farmlens/experiment.hpp"

namespace farmlens::report {

struct KlRow {
    std::string source;  // "published" or "synthetic"
    std::string campaign;
    std::array<double, kAgeBinCount> age{};  // percent
    double printed = -1;                     // printed KL, negative when absent
    double kl_base2 = 0;                     // KL(campaign || Facebook), bits
    double kl_reverse_nats = 0;              // KL(Facebook || campaign), nats
};

// Published campaign rows followed by one row per synthetic farm cohort, all
// measured against the published Facebook-wide age distribution.
std::vector<KlRow> kl_rows(const experiment::ReproResult* r);

void write_table2(std::ostream& out, const std::vector<KlRow>& rows);
void write_table4(std::ostream& out, const experiment::ReproResult& r);
void write_table5(std::ostream& out, const experiment::ReproResult& r);
void write_table6(std::ostream& out, const experiment::ReproResult& r);
void write_table7(std::ostream& out, const experiment::ReproResult& r);
void write_table8(std::ostream& out, const experiment::ReproResult& r);
void write_table9(std::ostream& out, const experiment::ReproResult& r);

std::map<std::string, std::string> provenance(const experiment::ReproConfig& cfg);

// Writes every table CSV into dir (created if missing); returns the file names.
std::vector<std::string> write_repro_outputs(const std::filesystem::path& dir, const experiment::ReproResult& r);

} // namespace farmlens::report
