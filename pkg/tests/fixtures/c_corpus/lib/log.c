#include <stdio.h>
#include "../util.h"

#define LOG_TWICE(m) \
    format_msg(m); \
    ghost()

void log_msg(const char *m)
{
    fprintf(stderr, "%s\n", format_msg(m));
}
