#ifndef UTIL_H
#define UTIL_H

void init(void);
void run(int n);
void shutdown(void);
void cleanup(void);
int compute(int x);
int config_load(const char *path);
void log_msg(const char *m);
const char *format_msg(const char *m);
void ghost(void);

static inline int sq(int x) { return x * x; }

#endif
