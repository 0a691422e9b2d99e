#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ppdp {

// One checked claim inside a scenario, tagged with the integrity or
// confidentiality property it instantiates (I1..I5, C1, C2). A limitation
// check asserts behavior the scheme documents as NOT prevented (post-
// collusion forgery with a dishonest CSP); it passes when the limitation
// holds exactly as documented and the pre-collusion proofs still bind.
struct ScenarioAssertion {
  std::string property;
  std::string description;
  bool passed{false};
  bool limitation{false};
};

struct ScenarioOutcome {
  std::string name;
  std::vector<ScenarioAssertion> assertions;

  bool ok() const {
    for (const auto& a : assertions) {
      if (!a.passed) return false;
    }
    return true;
  }
};

// Attack scenarios and the eight honesty assignments over
// {CSP, user, investigator}; "bar" marks the dishonest party.
const std::vector<std::string>& scenario_names();

// Runs one scripted adversarial scenario in a fresh temporary state
// directory. Deterministic for a fixed seed.
ScenarioOutcome run_scenario(const std::string& name, std::uint64_t seed);

std::vector<ScenarioOutcome> run_all_scenarios(std::uint64_t seed);

}  // namespace ppdp
