#pragma once

#include <string>
#include <vector>

// Re-checks every Feasible solver result with the Jacobi oracle. Installed once per
// test process; counts are cumulative.

namespace oracle {

struct AuditCounts {
    long audited = 0;
    long counterexamples = 0;
    std::vector<std::string> details;
};

void install_certificate_audit();
AuditCounts audit_counts();

} // namespace oracle
