/* Name matching. */
#include "util.h"

enum match_kind { MATCH_NONE, MATCH_NAME };

#if defined(FEATURE_FIND_PRINT0)
static void print_zero(const char *name)
{
    (void)name;
}
#endif

int apply_pattern(const char *name)
{
#if defined(FEATURE_FIND_PRINT0)
    print_zero(name);
#endif
    return name[0] == 'f';
}
