#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "dobkit.h"

TEST_CASE("version") { CHECK(dobkit_version() != nullptr); }
