'use strict';
const Store = (() => {
  const state = new Map();
  const listeners = new Set();

  function notify(key) {
    for (const l of listeners) {
      try {
        l(key, state.get(key));
      } catch (err) {
        console.error('listener failed', err);
      }
    }
  }

  class Model {
    constructor(id, data = {}) {
      this.id = id;
      this.data = data;
    }
    get keys() {
      return Object.keys(this.data);
    }
    update(patch) {
      Object.assign(this.data, patch);
      notify(this.id);
      return this;
    }
    toJSON() {
      return { id: this.id, ...this.data };
    }
    static from(json) {
      const parsed = typeof json === 'string' ? JSON.parse(json) : json;
      return new Model(parsed.id, parsed);
    }
  }

  return {
    put(id, data) {
      const m = new Model(id, data);
      state.set(id, m);
      notify(id);
      return m;
    },
    get: (id) => state.get(id),
    subscribe(fn) {
      listeners.add(fn);
      return () => listeners.delete(fn);
    },
    snapshot: () => [...state.values()].map(m => m.toJSON()),
    debounce(fn, ms) {
      let t;
      return function (...args) {
        clearTimeout(t);
        t = setTimeout(() => fn.apply(this, args), ms);
      };
    },
  };
})();
Store.put('a', { x: 1 });
