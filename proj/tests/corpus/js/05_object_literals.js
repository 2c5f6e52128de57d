const api = {
  plain: 1,
  method() {
    return this.plain;
  },
  get value() {
    return this.plain * 2;
  },
  set value(v) {
    this.plain = v / 2;
  },
  'quoted key'() {
    return 'q';
  },
  42() {
    return 42;
  },
  [`comp${1}`]() {
    return 'computed';
  },
  async am() {},
  *gen() { yield 1; },
  async *agen() { yield 2; },
  prop: function () { return 'expr'; },
  arrow: () => 'arrow',
  get: 5,
  set: 6,
  async: 7,
  static: 8,
};
api.method();
