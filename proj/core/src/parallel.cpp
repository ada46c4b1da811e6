#include "tdict/parallel.hpp"

#ifdef TDICT_HAVE_OPENMP
#include <omp.h>
#endif

namespace tdict {

namespace {
int g_default_threads = -1;
}

void set_max_threads(int threads) {
#ifdef TDICT_HAVE_OPENMP
  if (g_default_threads < 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : g_default_threads);
#else
  (void)threads;
  (void)g_default_threads;
#endif
}

int max_threads() {
#ifdef TDICT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace tdict
