#include "../util.h"

struct sink { void (*ghost)(void); };

const char *format_msg(const char *m)
{
    struct sink s, *p = &s;
    s.ghost = 0;
    if (p->ghost)
        p->ghost();
    s.ghost ();
    return m;
}
