#include <stdio.h>
#include "util.h"

/* main drives the program; ghost() in this comment is not a call */
int main(int argc, char **argv)
{
    const char *msg = "fake_call(1) inside a string";
    // ghost(); in a line comment
    init();
    if (argc > 1)
        run(argc);
    shutdown();
    printf("%s\n", msg);
    return 0;
}
