import { Api, resolveApiBase } from './api.js';
import { App } from './app.js';

const root = document.getElementById('app');
if (root) {
  const app = new App(root, new Api(resolveApiBase()));
  void app.start();
}
