export { readTable, numericColumns, stringColumn, SchemaError } from "./csv.js";
export { parseRecipe, RecipeError, FIGURE_KINDS } from "./recipe.js";
export { renderFigure } from "./figures.js";
