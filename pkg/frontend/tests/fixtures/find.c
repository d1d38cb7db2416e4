/* Scaled-down find(1) with compile-time features. */
#include "find.h"
#include "util.h"

struct find_options {
    int max_depth;
    char pattern[64];
};

static struct find_options options;
int match_count;

#if defined(FEATURE_FIND_TYPE)
static int check_type(const char *name)
{
    return name[0] != '.';
}
#endif

#if defined(FEATURE_FIND_MTIME)
static int check_mtime(long stamp)
{
    return stamp > 0;
}
#endif

#if defined(FEATURE_FIND_XDEV)
int xdev_count;

static int same_device(int dev)
{
    xdev_count++;
    return dev == 0;
}
#endif

#if ENABLE_EXEC
static int run_exec(const char *name)
{
    match_count = 0;
    return name != 0;
}
#endif

int find_main(int argc, char **argv)
{
    int status = walk_tree(argv[0], options.max_depth);
#if defined(FEATURE_FIND_TYPE)
    status = status + check_type(argv[0]);
#endif
#if defined(FEATURE_FIND_MTIME)
    status = status + check_mtime(1);
#endif
#if defined(FEATURE_FIND_XDEV)
    status = status + same_device(0);
#endif
    IF_EXEC(status = status + run_exec(argv[0]);)
    match_count = match_count + status + argc;
    return status;
}
