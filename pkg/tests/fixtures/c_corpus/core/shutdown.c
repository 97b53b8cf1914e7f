#include "../util.h"

void
shutdown(void)
{
    log_msg("bye");
    cleanup();
}
