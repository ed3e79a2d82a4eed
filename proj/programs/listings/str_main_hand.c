void str(char *s) {
  int i;

  for(i=0; s[i]; i++) {
    hook();  b->common.outstr[b->common.outidx++] = s[i];
  }
}

main() {
...
  if(child) {
    // thread 0
    str("ab");
    done();

  } else {
    // thread 1
    str("12");
    done();
  }
}
