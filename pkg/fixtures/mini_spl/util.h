#ifndef UTIL_H
#define UTIL_H

int walk_tree(const char *root, int depth);
int apply_pattern(const char *name);

#endif
