#pragma once

namespace tdict {

/// Caps the threads used for facewise transform-domain work. Zero or a
/// negative value restores the runtime default. Results never depend on it.
void set_max_threads(int threads);
int max_threads();

}  // namespace tdict
