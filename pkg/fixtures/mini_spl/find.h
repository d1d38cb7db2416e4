#ifndef FIND_H
#define FIND_H

#if defined(FEATURE_FIND_EXEC)
#define ENABLE_EXEC 1
#define IF_EXEC(...) __VA_ARGS__
#else
#define ENABLE_EXEC 0
#define IF_EXEC(...)
#endif

int find_main(int argc, char **argv);

#endif
