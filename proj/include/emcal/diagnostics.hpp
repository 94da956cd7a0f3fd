#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

namespace emcal {

/// Redirects warnings; nullptr silences them. Returns the previous sink.
std::ostream* set_warning_stream(std::ostream* os);

void warn(const std::string& message);

/// Worker count: EMCAL_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index runs exactly once; callers write results
/// into pre-sized slots so output order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace emcal
