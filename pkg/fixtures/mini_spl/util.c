/* Directory walking helpers. */
#include "util.h"

int visit_count;

#if defined(FEATURE_FIND_DEPTH)
static int depth_limit(int depth)
{
    return depth < 8;
}
#endif

int walk_tree(const char *root, int depth)
{
    visit_count++;
#if defined(FEATURE_FIND_DEPTH)
    if (depth_limit(depth)) {
        return 0;
    }
#endif
    return apply_pattern(root) + depth;
}
