#pragma once

#include <cmath>
#include <string>

#include "kgext/ingest.hpp"
#include "kgext/model.hpp"
#include "kgext/text.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(KGEXT_FIXTURE_DIR) + "/" + name; }

inline kgext::KnowledgeGraph load(const std::string& name) { return kgext::ingest::load_graph(fixture(name)); }

inline bool near(double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; }

}  // namespace testing
