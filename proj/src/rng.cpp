#include "boed/rng.hpp"

namespace boed {

static_assert(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
static_assert(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));

}  // namespace boed
