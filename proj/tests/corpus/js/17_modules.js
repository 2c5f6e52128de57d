import { helper } from './helper.js';
import * as ns from './ns.js';
export function exported() {
  return helper();
}
export default function () {
  return 'default export';
}
export const arrow = () => ns.value;
export class Exported {
  method() { return 1; }
}
const meta = import.meta.url;
const lazy = () => import('./lazy.js');
await Promise.resolve();
