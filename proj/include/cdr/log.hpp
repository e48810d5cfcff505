#pragma once

namespace cdr {

/// Routes spdlog's default logger to stderr and sets its level from the
/// CD_LOG environment variable (trace|debug|info|warn|error|off; default warn).
void configure_logging();

}  // namespace cdr
