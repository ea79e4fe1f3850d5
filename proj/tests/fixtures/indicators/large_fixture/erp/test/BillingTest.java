package erp.test;

import erp.Customer;
import erp.Invoice;
import erp.Order;
import erp.Product;
import junit.framework.TestCase;

public class BillingTest extends TestCase {
    private Customer customer;
    private Order order;
    private Invoice invoice;
    private Product product;

    protected void setUp() {
        customer = new Customer();
        order = new Order();
        invoice = new Invoice();
        product = new Product();
    }

    public void testCustomer() {
        assertEquals(1, customer.name());
    }

    public void testOrder() {
        assertEquals(1, order.total());
    }

    public void testInvoice() {
        assertEquals(1, invoice.number());
    }

    public void testProduct() {
        assertEquals(1, product.price());
    }
}
