#pragma once
// JSON and CSV plumbing shared by the experiment driver and the tests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "decaylab/comparison.hpp"
#include "decaylab/envelope.hpp"
#include "decaylab/gn.hpp"
#include "decaylab/pde.hpp"
#include "decaylab/rates.hpp"
#include "decaylab/steepness.hpp"

namespace decaylab::io {

using json = nlohmann::ordered_json;

// {"kind","kappa","M","s0","a","lambda0"} plus "r" for PowerLaw. On input,
// missing "a" and "s0" are derived from the kind's construction.
json to_json(const SteepnessFunction& L);
SteepnessFunction steepness_from_json(const json& j);

json to_json(const DecayEnvelope& e);
DecayEnvelope envelope_from_json(const json& j);

json to_json(const HypothesisReport& r);
json to_json(const ConvexityReport& r);
json to_json(const TranscendentalResult& r);
json to_json(const FamilyScan& s);
json to_json(const RateFit& f);
json to_json(const BoundCheck& b);
json to_json(const BaselineReport& b);
json to_json(const SandwichReport& s);
json to_json(const LyapunovReport& r);
json to_json(const SemiconvexityReport& r);
json to_json(const LinftyReport& r);
json to_json(const LadderReport& r);
json to_json(const SubsolutionReport& r);
json to_json(const SteadyState& s);

// JSON with a trailing newline, numbers printed with full precision.
std::string dump(const json& j);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& contents);

// Parsed numeric CSV; `error` is empty when every row has the header's arity
// and every field parses as a number.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string error;
};
CsvTable read_csv(const std::string& text);

}  // namespace decaylab::io
