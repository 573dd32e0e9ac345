#pragma once

#include "mpslearn/learner.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace mpslearn {

/// Versioned text format; the plan is stored and re-validated on load.
void write_circuit(std::ostream& out, const CircuitDescription& circuit);
CircuitDescription read_circuit(std::istream& in);

void save_circuit(const std::string& path, const CircuitDescription& circuit);
CircuitDescription load_circuit(const std::string& path);

}  // namespace mpslearn
